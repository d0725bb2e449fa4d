#include "credence/types.hpp"

#include <cmath>

namespace credence {

RegionInfo classify_region(const std::vector<double>& values) {
  if (values.empty())
    throw std::invalid_argument("classify_region: empty vector");
  RegionInfo info;
  int extremes = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v) || v < 0.0 || v > 1.0)
      throw std::invalid_argument("classify_region: coordinate " + std::to_string(i) +
                                  " outside [0,1]");
    if (v == 0.0 || v == 1.0) {
      ++extremes;
      info.extreme_index = static_cast<int>(i);
    }
  }
  if (extremes == 0) {
    info.region = Region::Interior;
    info.extreme_index = -1;
  } else if (extremes == 1) {
    info.region = Region::SinglyExtreme;
  } else {
    info.region = Region::Invalid;
    info.extreme_index = -1;
  }
  return info;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::Interior: return "interior";
    case Region::SinglyExtreme: return "singly_extreme";
    case Region::Invalid: return "invalid";
  }
  return "unknown";
}

UnreliabilityVector::UnreliabilityVector(std::vector<double> values)
    : values_(std::move(values)), info_(classify_region(values_)) {}

UnreliabilityVector UnreliabilityVector::half(std::size_t n) {
  return UnreliabilityVector(std::vector<double>(n, 0.5));
}

void validate_verdicts(const VerdictVector& r, std::size_t n) {
  if (r.size() != n)
    throw std::invalid_argument("verdicts: expected " + std::to_string(n) +
                                " entries, got " + std::to_string(r.size()));
  for (int v : r)
    if (v != -1 && v != 1)
      throw std::invalid_argument("verdicts: entries must be -1 or +1");
}

}  // namespace credence
