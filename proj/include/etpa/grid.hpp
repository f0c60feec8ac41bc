#pragma once

#include <cstddef>
#include <vector>

namespace etpa {

// Uniform, strictly increasing angular-frequency grid. The spectral measure
// throughout is dw/(2 pi).
class FrequencyGrid {
 public:
  // Validates uniform spacing to 1e-12 relative and that center lies inside.
  FrequencyGrid(std::vector<double> points, double center);

  static FrequencyGrid regular(double center, double half_span, std::size_t n);

  std::size_t size() const { return n_; }
  double spacing() const { return spacing_; }
  double center() const { return center_; }
  double min() const { return min_; }
  double max() const { return min_ + spacing_ * (n_ - 1); }
  double point(std::size_t i) const { return min_ + spacing_ * i; }
  std::vector<double> points() const;

  bool operator==(const FrequencyGrid& o) const {
    return n_ == o.n_ && min_ == o.min_ && spacing_ == o.spacing_;
  }

 private:
  FrequencyGrid(double min, double spacing, std::size_t n, double center)
      : min_(min), spacing_(spacing), n_(n), center_(center) {}
  double min_, spacing_;
  std::size_t n_;
  double center_;
};

}  // namespace etpa
