#include "etpa/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace etpa {

FrequencyGrid::FrequencyGrid(std::vector<double> points, double center) {
  if (points.size() < 2) throw std::invalid_argument("FrequencyGrid: need at least 2 points");
  const double h0 = points[1] - points[0];
  if (h0 <= 0.0) throw std::invalid_argument("FrequencyGrid: points must be strictly increasing");
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double h = points[i] - points[i - 1];
    if (h <= 0.0) throw std::invalid_argument("FrequencyGrid: points must be strictly increasing");
    if (std::abs(h - h0) > 1e-12 * std::abs(h0))
      throw std::invalid_argument("FrequencyGrid: spacing not uniform to 1e-12 relative");
  }
  if (center < points.front() || center > points.back())
    throw std::invalid_argument("FrequencyGrid: center outside [min, max]");
  min_ = points.front();
  spacing_ = (points.back() - points.front()) / (points.size() - 1);
  n_ = points.size();
  center_ = center;
}

FrequencyGrid FrequencyGrid::regular(double center, double half_span, std::size_t n) {
  if (n < 2) throw std::invalid_argument("FrequencyGrid: need at least 2 points");
  if (half_span <= 0.0) throw std::invalid_argument("FrequencyGrid: half_span must be positive");
  const double spacing = 2.0 * half_span / (n - 1);
  return FrequencyGrid(center - half_span, spacing, n, center);
}

std::vector<double> FrequencyGrid::points() const {
  std::vector<double> p(n_);
  for (std::size_t i = 0; i < n_; ++i) p[i] = point(i);
  return p;
}

}  // namespace etpa
