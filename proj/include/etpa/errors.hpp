#pragma once

#include <stdexcept>
#include <string>

namespace etpa {

// Carrier within the guard band of an intermediate (or final) transition:
// the far-off-resonance engine is invalid there.
class NearResonanceError : public std::runtime_error {
 public:
  explicit NearResonanceError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine could not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Symmetrization annihilated the state (antisymmetric JSA).
class DegenerateStateError : public std::runtime_error {
 public:
  explicit DegenerateStateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace etpa
