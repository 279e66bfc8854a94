#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace grasseig {

/// One numerically checked invariant.  `max_violation` is the largest amount
/// by which the inequality or identity was missed (<= 0 means it held with
/// room to spare); `pass` is max_violation <= tolerance.
struct PropertyResult {
  std::string name;
  int samples = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

std::vector<PropertyResult> verify_geometry(std::uint64_t seed = 1);
std::vector<PropertyResult> verify_convexity(std::uint64_t seed = 1);
std::vector<PropertyResult> verify_solvers(std::uint64_t seed = 1);

/// "geometry", "convexity", "solvers", or empty for all.  Throws
/// ConfigurationError for an unknown selector.
std::vector<PropertyResult> verify_suite(const std::string& selector, std::uint64_t seed = 1);

}  // namespace grasseig
