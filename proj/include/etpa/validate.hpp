#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace etpa::validate {

struct Check {
  std::string name;
  double computed;
  double target;
  double tolerance;  // |computed - target| <= tolerance * max(|target|, floor)
  bool pass;
  double margin;  // |computed - target| / tolerance-scale
};

struct Report {
  std::uint64_t seed;
  std::vector<Check> checks;
  bool all_pass;
  nlohmann::json to_json() const;
};

// Oracle-vs-closed-form battery behind `tpa validate`. A finite tol_override
// replaces every check's default tolerance.
Report run(double tol_override = std::numeric_limits<double>::quiet_NaN(),
           std::uint64_t seed = 12345);

}  // namespace etpa::validate
