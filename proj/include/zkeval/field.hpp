#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace zkeval {

// Element of the prime field F_p with p = 2^64 - 2^32 + 1.
class Fe {
 public:
  static constexpr uint64_t kModulus = 0xFFFFFFFF00000001ULL;
  // Largest value that still decodes as nonnegative in the centered
  // representation.
  static constexpr uint64_t kHalfRange = (kModulus - 1) / 2;

  constexpr Fe() = default;
  // Reduces `v` modulo p.
  constexpr explicit Fe(uint64_t v) : value_(v >= kModulus ? v - kModulus : v) {}

  static Fe from_signed(int64_t v);
  // Builds an element from a value that must already be canonical (< p).
  static bool from_canonical(uint64_t v, Fe* out);

  constexpr uint64_t value() const { return value_; }
  // Centered lift: values <= kHalfRange are nonnegative, the rest negative.
  int64_t to_signed() const;
  bool is_zero() const { return value_ == 0; }

  Fe operator+(Fe o) const;
  Fe operator-(Fe o) const;
  Fe operator*(Fe o) const;
  Fe operator-() const;
  Fe& operator+=(Fe o) { return *this = *this + o; }
  Fe& operator-=(Fe o) { return *this = *this - o; }
  Fe& operator*=(Fe o) { return *this = *this * o; }

  Fe pow(uint64_t e) const;
  // Multiplicative inverse; the inverse of zero is defined as zero.
  Fe inverse() const;

  friend constexpr bool operator==(Fe a, Fe b) { return a.value_ == b.value_; }
  friend constexpr auto operator<=>(Fe a, Fe b) { return a.value_ <=> b.value_; }

 private:
  uint64_t value_ = 0;
};

Fe add(Fe a, Fe b);
Fe mul(Fe a, Fe b);

// Fixed-point encoding of reals r ~ v / 2^scale, negatives in the top half of
// the field.
struct FixedPointCodec {
  int scale = 7;
  double half_range() const { return static_cast<double>(Fe::kHalfRange); }
};

// Rounds half away from zero. Throws OverflowError when |r * 2^s| >= p/2.
Fe encode(double r, const FixedPointCodec& codec);
int64_t encode_raw(double r, int scale);
double decode(Fe v, const FixedPointCodec& codec);
double decode_raw(int64_t raw, int scale);

// Brings a value from a finer grid onto a coarser one, flooring toward
// negative infinity.
Fe rescale(Fe v, int from_scale, int to_scale);
int64_t floor_shift(int64_t raw, int shift);

}  // namespace zkeval
