// Acceptance suite driver: runs the spec criteria and exits nonzero on any
// failure. `--criterion N` restricts to a single criterion (used by ctest to
// report them individually).

#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "udw/verify.hpp"

int main(int argc, char** argv) {
    std::vector<int> criteria;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            criteria.push_back(std::atoi(argv[++i]));
    }
    const auto results = udw::run_acceptance(criteria, std::cout);
    return udw::acceptance_exit_code(results);
}
