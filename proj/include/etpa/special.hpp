#pragma once

#include <complex>

namespace etpa {

// Scaled complementary error function erfcx(x) = exp(x^2) erfc(x), stable for
// large x where the naive product overflows. Accepts any real x; callers in
// the TPA engine only need x >= 0.
double erfcx(double x);

// xi(z) = exp(z^2) erfc(z) for z >= 0, the lineshape factor of the Gaussian
// closed forms. xi(0) = 1, monotone decreasing, ~ 1/(sqrt(pi) z) for large z.
// Throws std::domain_error for z < 0.
double xi_erfcx(double z);

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im(z) >= 0.
// Re(w) is the Voigt profile; w(i y) = erfcx(y). Accuracy ~1e-13.
std::complex<double> faddeeva_w(std::complex<double> z);

}  // namespace etpa
