#include "etpa/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "etpa/constants.hpp"

namespace etpa::quad {

const GLRule& gauss_legendre(int n) {
  static std::map<int, GLRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GLRule r;
  r.x.resize(n);
  r.w.resize(n);
  // Newton iteration on P_n, Chebyshev-angle initial guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p1 = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      p1 = dp;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * p1 * p1);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

Nodes gl_interval(double a, double b, int n) {
  const GLRule& r = gauss_legendre(n);
  Nodes nd;
  nd.x.resize(n);
  nd.w.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    nd.x[i] = mid + half * r.x[i];
    nd.w[i] = half * r.w[i];
  }
  return nd;
}

Nodes gl_panels(double a, double b, int panels, int n) {
  Nodes nd;
  const double dx = (b - a) / panels;
  for (int p = 0; p < panels; ++p) nd.append(gl_interval(a + p * dx, a + (p + 1) * dx, n));
  return nd;
}

Nodes tan_line(double center, double scale, int n) {
  const GLRule& r = gauss_legendre(n);
  Nodes nd;
  nd.x.resize(n);
  nd.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * kPi * r.x[i];
    const double c = std::cos(u);
    nd.x[i] = center + scale * std::tan(u);
    nd.w[i] = 0.5 * kPi * r.w[i] * scale / (c * c);
  }
  return nd;
}

Nodes rational_tail(double x0, double scale, int n) {
  const GLRule& r = gauss_legendre(n);
  Nodes nd;
  nd.x.resize(n);
  nd.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (r.x[i] + 1.0);  // (0,1)
    const double om = 1.0 - t;
    nd.x[i] = x0 + scale * t / om;
    nd.w[i] = 0.5 * r.w[i] * scale / (om * om);
  }
  return nd;
}

Nodes rational_tail_left(double x0, double scale, int n) {
  Nodes nd = rational_tail(0.0, scale, n);
  for (auto& x : nd.x) x = x0 - x;
  return nd;
}

Nodes structured_line(const std::vector<std::pair<double, double>>& structures, int gl_order) {
  if (structures.empty()) throw std::invalid_argument("structured_line: need a structure");
  double cmin = structures[0].first, cmax = cmin, smax = 0.0;
  for (const auto& [c, s] : structures) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    smax = std::max(smax, s);
  }
  const double C = 0.5 * (cmin + cmax);
  const double S = std::max({smax, 0.25 * (cmax - cmin), 1e-300});
  auto to_u = [&](double x) { return std::atan((x - C) / S); };
  std::vector<double> cuts{-0.5 * kPi, 0.5 * kPi};
  for (const auto& [c, s] : structures)
    for (int k = -2; k <= 24; ++k) {
      const double d = std::ldexp(1.0, k) * 0.25 * s;
      cuts.push_back(to_u(c - d));
      cuts.push_back(to_u(c + d));
      if (k == -2) cuts.push_back(to_u(c));
    }
  std::sort(cuts.begin(), cuts.end());
  Nodes nd;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-14) continue;
    Nodes panel = gl_interval(cuts[i], cuts[i + 1], gl_order);
    for (std::size_t j = 0; j < panel.size(); ++j) {
      const double u = panel.x[j], cu = std::cos(u);
      nd.x.push_back(C + S * std::tan(u));
      nd.w.push_back(panel.w[j] * S / (cu * cu));
    }
  }
  return nd;
}

namespace {

// Inverse Vandermonde for nodes t = {-2,-1,0,1,2}: a_k = sum_j W[k][j] f_j
// gives the quartic P(t) = sum a_k t^k through the five samples.
struct QuarticFit {
  double w[5][5];
  QuarticFit() {
    double v[5][10];
    for (int j = 0; j < 5; ++j) {
      const double t = j - 2.0;
      double p = 1.0;
      for (int k = 0; k < 5; ++k) {
        v[j][k] = p;  // Vandermonde row: P(t_j) = sum_k a_k t_j^k
        p *= t;
      }
      for (int k = 0; k < 5; ++k) v[j][5 + k] = (j == k) ? 1.0 : 0.0;
    }
    // Gauss-Jordan on [V^T | I] solving V^T a-rows
    for (int c = 0; c < 5; ++c) {
      int piv = c;
      for (int r = c + 1; r < 5; ++r)
        if (std::abs(v[r][c]) > std::abs(v[piv][c])) piv = r;
      for (int k = 0; k < 10; ++k) std::swap(v[c][k], v[piv][k]);
      const double d = v[c][c];
      for (int k = 0; k < 10; ++k) v[c][k] /= d;
      for (int r = 0; r < 5; ++r) {
        if (r == c) continue;
        const double m = v[r][c];
        for (int k = 0; k < 10; ++k) v[r][k] -= m * v[c][k];
      }
    }
    for (int k = 0; k < 5; ++k)
      for (int j = 0; j < 5; ++j) w[k][j] = v[k][5 + j];
  }
};

// Moments int_{va}^{vb} v^k / (gammap + i v) dv, k = 0..4, for complex gammap
// with positive real part (v measured from the local window center).
void shifted_moments(cd gammap, double va, double vb, cd m[5]) {
  m[0] = cd(0.0, -1.0) * (std::log(gammap + cd(0.0, vb)) - std::log(gammap + cd(0.0, va)));
  double pa = va, pb = vb;
  for (int k = 1; k < 5; ++k) {
    m[k] = cd(0.0, -1.0) * ((pb * vb - pa * va) / double(k + 1) - gammap * m[k - 1]);
    pa *= va;
    pb *= vb;
  }
}

}  // namespace

cd lorentzian_product_integral(const std::vector<cd>& f, double x0, double h,
                               double gamma, double delta) {
  const size_t n = f.size();
  if (n < 5) throw std::invalid_argument("lorentzian_product_integral: need >= 5 samples");
  if (gamma <= 0.0) throw std::invalid_argument("lorentzian_product_integral: gamma must be > 0");
  static const QuarticFit fit;
  KahanSumC acc;
  // windows of 4 cells with a quartic through their 5 samples; kernel
  // 1/(gamma + i(x - delta)) integrated exactly about each window center
  auto add_window = [&](size_t j0, double lo_t, double hi_t) {
    const double center = x0 + (j0 + 2) * h;  // middle sample
    const cd gammap = cd(gamma, 0.0) + cd(0.0, center - delta);
    cd m[5];
    shifted_moments(gammap, lo_t * h, hi_t * h, m);
    cd a[5];
    for (int k = 0; k < 5; ++k) {
      a[k] = 0.0;
      for (int j = 0; j < 5; ++j) a[k] += fit.w[k][j] * f[j0 + j];
    }
    double hk = 1.0;
    for (int k = 0; k < 5; ++k) {
      acc.add(a[k] * m[k] / hk);
      hk *= h;
    }
  };
  size_t j = 0;
  for (; j + 4 < n; j += 4) add_window(j, -2.0, 2.0);
  const size_t rem = (n - 1) % 4;
  if (rem) add_window(n - 5, 2.0 - double(rem), 2.0);
  return acc.value();
}

double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  KahanSum s;
  s.add(0.5 * f.front());
  for (size_t i = 1; i + 1 < f.size(); ++i) s.add(f[i]);
  s.add(0.5 * f.back());
  return s.value() * h;
}

cd trapezoid(const std::vector<cd>& f, double h) {
  if (f.size() < 2) return 0.0;
  KahanSumC s;
  s.add(0.5 * f.front());
  for (size_t i = 1; i + 1 < f.size(); ++i) s.add(f[i]);
  s.add(0.5 * f.back());
  return s.value() * h;
}

}  // namespace etpa::quad
