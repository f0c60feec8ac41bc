#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace etpa::quad {

using cd = std::complex<double>;

// Compensated (Kahan) accumulator, so reduction order does not leak into
// results beyond ~1e-13.
class KahanSum {
 public:
  void add(double v) {
    double y = v - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

class KahanSumC {
 public:
  void add(cd v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  cd value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum re_, im_;
};

// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
struct GLRule {
  std::vector<double> x, w;
};
const GLRule& gauss_legendre(int n);

// Nodes/weights of a 1-D quadrature over an arbitrary set of intervals or maps.
struct Nodes {
  std::vector<double> x, w;
  void append(const Nodes& o) {
    x.insert(x.end(), o.x.begin(), o.x.end());
    w.insert(w.end(), o.w.begin(), o.w.end());
  }
  size_t size() const { return x.size(); }
};

// Plain GL nodes on [a, b].
Nodes gl_interval(double a, double b, int n);

// Composite GL: [a, b] split into `panels` equal panels of order n each.
Nodes gl_panels(double a, double b, int panels, int n);

// Whole real line via x = center + scale * tan(u): exact for Lorentzian-type
// tails, geometric convergence for integrands analytic near the line.
Nodes tan_line(double center, double scale, int n);

// Semi-infinite [x0, inf) via x = x0 + scale * t/(1-t): rational tail map,
// exact for ~1/x^2 decay.
Nodes rational_tail(double x0, double scale, int n);

// (-inf, x0] mirror of rational_tail.
Nodes rational_tail_left(double x0, double scale, int n);

// [0, inf) for difference-time integrals, graded toward 0:
// x = scale * t/(1-t) with GL nodes in t.
inline Nodes semi_infinite(double scale, int n) { return rational_tail(0.0, scale, n); }

template <typename F>
auto sum_nodes(const Nodes& nd, F&& f) {
  using R = decltype(f(0.0));
  if constexpr (std::is_same_v<R, double>) {
    KahanSum s;
    for (size_t i = 0; i < nd.x.size(); ++i) s.add(nd.w[i] * f(nd.x[i]));
    return s.value();
  } else {
    KahanSumC s;
    for (size_t i = 0; i < nd.x.size(); ++i) s.add(nd.w[i] * f(nd.x[i]));
    return s.value();
  }
}

// Whole-line nodes resolving several (center, scale) structures at once:
// master tan map with dyadically graded panels around every structure.
Nodes structured_line(const std::vector<std::pair<double, double>>& structures, int gl_order = 12);

// Integral over the real line of f(x)/(gamma + i (x - delta)) for f sampled on
// a uniform grid (f piecewise-quadratic, the complex Lorentzian kernel exact).
// Robust for gamma much smaller than the grid spacing. Includes the 1/(2 pi)
// spectral measure only if the caller folds it into f.
cd lorentzian_product_integral(const std::vector<cd>& f, double x0, double h,
                               double gamma, double delta);

// Trapezoid weight integral of uniform samples (endpoints halved).
double trapezoid(const std::vector<double>& f, double h);
cd trapezoid(const std::vector<cd>& f, double h);

}  // namespace etpa::quad
