#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace udw {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::vector<std::string> details;
};

// Runs the acceptance criteria (all eight when `criteria` is empty), printing
// one [PASS]/[FAIL] line per criterion plus detail lines to `log`.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& criteria,
                                            std::ostream& log);

// Exit status: 0 iff every executed criterion passed.
int acceptance_exit_code(const std::vector<CriterionResult>& results);

// Brute-force negativity: absolute sum of the negative eigenvalues of the
// partial transpose (over the first qubit) of a 4x4 Hermitian density matrix
// in the |gg>,|ge>,|eg>,|ee> basis. Independent oracle for the closed form
// (cyclic complex Jacobi eigensolver).
double negativity_bruteforce(const std::array<std::complex<double>, 16>& rho);

// Eigenvalues of a 4x4 complex Hermitian matrix, ascending (Jacobi sweeps).
std::array<double, 4> hermitian4_eigenvalues(const std::array<std::complex<double>, 16>& h);

} // namespace udw
