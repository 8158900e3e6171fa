#include "udw/faddeeva.hpp"

#include <cmath>

namespace udw {
namespace {

using cd = std::complex<double>;

constexpr double kSqrtPiInv = 0.5641895835477562869; // 1/sqrt(pi)

// Weideman (SIAM Rev. 36 (1994) 604) rational expansion, N = 40.
// Coefficients generated from the standard FFT construction, L = sqrt(N/sqrt(2)).
constexpr double kWeidemanL = 5.3182958969449885;
constexpr double kWeidemanCoeffs[40] = {
    -3.52218254562330928e-15, 1.34336985979643937e-15, 1.18932641512969894e-14, -5.14172038279525623e-15,
    -7.06965735952636060e-14, 1.39059770642990799e-14, 4.53376572395747226e-13, 1.20178988830856027e-13,
    -2.90794055501919518e-12, -2.72759592689908459e-12, 1.77143633095511164e-11, 3.47272433032230778e-11,
    -9.05513886095832302e-11, -3.56323504036026841e-10, 2.10860040539273531e-10, 3.01778064759616898e-09,
    3.24974671617184177e-09, -1.83156166122522292e-08, -6.35177345165161000e-08, 1.41986428003892933e-08,
    5.91213695473602453e-07, 1.48356611322057741e-06, -1.06601389855522444e-06, -1.80074471447059483e-05,
    -5.59130926426121264e-05, -3.93936314550202851e-05, 4.39807015986737337e-04, 2.70540563307362101e-03,
    1.00481862427833409e-02, 2.92029164712417806e-02, 7.18236177907432827e-02, 1.55042638024794760e-01,
    2.99894379961500479e-01, 5.26652898827708382e-01, 8.47217457659381501e-01, 1.25638156757651287e+00,
    1.72538308481797742e+00, 2.20151379487831189e+00, 2.61605415276186060e+00, 2.89962450938970484e+00,
};

cd w_weideman(cd z) {
    const cd iz(-z.imag(), z.real());
    const cd lm = kWeidemanL - iz;
    const cd lp = kWeidemanL + iz;
    const cd Z = lp / lm;
    cd p = kWeidemanCoeffs[0];
    for (int i = 1; i < 40; ++i) p = p * Z + kWeidemanCoeffs[i];
    return 2.0 * p / (lm * lm) + kSqrtPiInv / lm;
}

// Gautschi-style continued fraction, adequate for |z| > 7, Im z >= 0.
cd w_contfrac(cd z) {
    cd r = 0.0;
    for (int n = 12; n >= 1; --n) r = (0.5 * n) / (z - r);
    return cd(0.0, kSqrtPiInv) / (z - r);
}

cd w_upper(cd z) {
    return std::norm(z) > 49.0 ? w_contfrac(z) : w_weideman(z);
}

} // namespace

cd faddeeva_w(cd z) {
    if (z.imag() >= 0.0) return w_upper(z);
    // w(z) = 2 exp(-z^2) - w(-z)
    return 2.0 * std::exp(-z * z) - w_upper(-z);
}

cd erfc_via_w(cd z) {
    return std::exp(-z * z) * faddeeva_w(cd(-z.imag(), z.real()));
}

} // namespace udw
