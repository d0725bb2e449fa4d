// Core value types shared across the library: parameter vectors on the
// closed unit cube, verdict vectors in {-1,+1}^n, and a tagged extended
// real for quantities that take exact infinities at the cube boundary.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace credence {

// Where a parameter vector sits in [0,1]^n. Interior: all coordinates in
// (0,1). SinglyExtreme: exactly one coordinate pinned at 0 or 1. Invalid:
// two or more pinned coordinates; no finite observation run can separate
// the hidden sign from its flip there, so every operation rejects it.
enum class Region { Interior, SinglyExtreme, Invalid };

struct RegionInfo {
  Region region = Region::Interior;
  int extreme_index = -1;  // pinned coordinate when SinglyExtreme
};

// Throws std::invalid_argument on empty input, NaN, or values outside [0,1].
RegionInfo classify_region(const std::vector<double>& values);

const char* region_name(Region r);

// Per-agent flip probabilities (true values or a running estimate).
// Construction validates the range and caches the region tag; consumers
// that cannot handle a given region reject it themselves.
class UnreliabilityVector {
 public:
  explicit UnreliabilityVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  Region region() const { return info_.region; }
  int extreme_index() const { return info_.extreme_index; }
  bool interior() const { return info_.region == Region::Interior; }

  static UnreliabilityVector half(std::size_t n);

 private:
  std::vector<double> values_;
  RegionInfo info_;
};

// One verdict per agent, each -1 or +1.
using VerdictVector = std::vector<int>;

void validate_verdicts(const VerdictVector& r, std::size_t n);

// Scalar that is either finite or an exact signed infinity. Log odds at a
// pinned coordinate and likelihood ratios against singly-extreme parameters
// take exact infinite values; carrying them as IEEE infinities invites
// 0*inf = NaN in downstream arithmetic, so consumers must branch on the
// tag instead. value() throws on a non-finite tag to enforce that.
class ExtendedReal {
 public:
  enum class Tag { Finite, PosInf, NegInf };

  static ExtendedReal finite(double v) { return ExtendedReal(Tag::Finite, v); }
  static ExtendedReal pos_inf() { return ExtendedReal(Tag::PosInf, 0.0); }
  static ExtendedReal neg_inf() { return ExtendedReal(Tag::NegInf, 0.0); }

  Tag tag() const { return tag_; }
  bool is_finite() const { return tag_ == Tag::Finite; }
  bool is_pos_inf() const { return tag_ == Tag::PosInf; }
  bool is_neg_inf() const { return tag_ == Tag::NegInf; }

  double value() const {
    if (tag_ != Tag::Finite)
      throw std::logic_error("ExtendedReal: value() on a non-finite tag");
    return value_;
  }

 private:
  ExtendedReal(Tag t, double v) : tag_(t), value_(v) {}
  Tag tag_;
  double value_;
};

}  // namespace credence
