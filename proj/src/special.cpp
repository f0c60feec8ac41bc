#include "etpa/special.hpp"

#include <cmath>
#include <stdexcept>

#include "etpa/constants.hpp"

namespace etpa {

namespace {

// Laplace continued fraction, accurate to <1e-16 for x >= 6.
double erfcx_cf(double x) {
  double f = x;
  for (int k = 30; k >= 1; --k) f = x + 0.5 * k / f;
  return 1.0 / (kSqrtPi * f);
}

}  // namespace

double erfcx(double x) {
  if (x >= 6.0) return erfcx_cf(x);
  if (x >= 0.0) return std::exp(x * x) * std::erfc(x);
  // erfcx(-x) = 2 exp(x^2) - erfcx(x); overflows to +inf below x ~ -26.6.
  return 2.0 * std::exp(x * x) - erfcx(-x);
}

double xi_erfcx(double z) {
  if (z < 0.0) throw std::domain_error("xi_erfcx: z must be >= 0");
  return erfcx(z);
}

std::complex<double> faddeeva_w(std::complex<double> z) {
  const double x = z.real(), y = z.imag();
  if (y < 0.0) throw std::domain_error("faddeeva_w: Im(z) must be >= 0");
  if (x == 0.0) return {erfcx(y), 0.0};

  // Midpoint trapezoidal sum for (i/pi) Integral e^{-t^2}/(z-t) dt, spacing h,
  // plus the image-pole correction for y < pi/h. Error ~ exp(-pi^2/h^2).
  constexpr double h = 0.45;
  constexpr int N = 16;  // covers |t| <= 7
  std::complex<double> sum = 0.0;
  for (int k = -N; k < N; ++k) {
    const double t = (k + 0.5) * h;
    sum += std::exp(-t * t) / (z - t);
  }
  std::complex<double> w = std::complex<double>(0.0, h / kPi) * sum;

  if (y < kPi / h) {
    // q = -exp(2 pi i z / h); correction 2 e^{-z^2} q/(1-q).
    const double mag_log = (y * y - x * x) - kTwoPi * y / h;
    if (mag_log > -45.0) {
      const std::complex<double> q = -std::exp(std::complex<double>(0.0, kTwoPi / h) * z);
      w -= 2.0 * std::exp(-z * z) * q / (1.0 - q);
    }
  }
  return w;
}

}  // namespace etpa
