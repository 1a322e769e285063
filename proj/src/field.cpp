#include "zkeval/field.hpp"

#include <cmath>

#include "zkeval/errors.hpp"

namespace zkeval {

Fe Fe::from_signed(int64_t v) {
  if (v >= 0) return Fe(static_cast<uint64_t>(v));
  // -v may not fit for INT64_MIN; handle via unsigned arithmetic.
  uint64_t mag = static_cast<uint64_t>(-(v + 1)) + 1;
  return -Fe(mag);
}

bool Fe::from_canonical(uint64_t v, Fe* out) {
  if (v >= kModulus) return false;
  *out = Fe(v);
  return true;
}

int64_t Fe::to_signed() const {
  if (value_ <= kHalfRange) return static_cast<int64_t>(value_);
  return -static_cast<int64_t>(kModulus - value_);
}

Fe Fe::operator+(Fe o) const {
  uint64_t s = value_ + o.value_;
  bool carry = s < value_;
  if (carry || s >= kModulus) s -= kModulus;
  Fe r;
  r.value_ = s;
  return r;
}

Fe Fe::operator-(Fe o) const {
  uint64_t d = value_ - o.value_;
  if (value_ < o.value_) d += kModulus;
  Fe r;
  r.value_ = d;
  return r;
}

Fe Fe::operator-() const { return Fe() - *this; }

Fe Fe::operator*(Fe o) const {
  unsigned __int128 prod = static_cast<unsigned __int128>(value_) * o.value_;
  Fe r;
  r.value_ = static_cast<uint64_t>(prod % kModulus);
  return r;
}

Fe Fe::pow(uint64_t e) const {
  Fe base = *this;
  Fe acc(1);
  while (e) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

Fe Fe::inverse() const { return pow(kModulus - 2); }

Fe add(Fe a, Fe b) { return a + b; }
Fe mul(Fe a, Fe b) { return a * b; }

int64_t encode_raw(double r, int scale) {
  double scaled = std::ldexp(r, scale);
  if (!std::isfinite(scaled) || std::fabs(scaled) >= static_cast<double>(Fe::kHalfRange)) {
    throw OverflowError("value " + std::to_string(r) + " at scale " + std::to_string(scale) +
                        " exceeds the field's signed range");
  }
  // std::round rounds half away from zero.
  double rounded = std::round(scaled);
  if (std::fabs(rounded) >= static_cast<double>(Fe::kHalfRange)) {
    throw OverflowError("rounded value exceeds the field's signed range");
  }
  return static_cast<int64_t>(rounded);
}

Fe encode(double r, const FixedPointCodec& codec) {
  return Fe::from_signed(encode_raw(r, codec.scale));
}

double decode_raw(int64_t raw, int scale) { return std::ldexp(static_cast<double>(raw), -scale); }

double decode(Fe v, const FixedPointCodec& codec) { return decode_raw(v.to_signed(), codec.scale); }

int64_t floor_shift(int64_t raw, int shift) {
  if (shift <= 0) return raw;
  if (shift >= 63) return raw < 0 ? -1 : 0;
  return raw >> shift;  // arithmetic shift == floor division by 2^shift
}

Fe rescale(Fe v, int from_scale, int to_scale) {
  if (from_scale < to_scale) {
    throw InvalidArgument("rescale requires from_scale >= to_scale");
  }
  int64_t raw = v.to_signed();
  int64_t out = floor_shift(raw, from_scale - to_scale);
  if (static_cast<uint64_t>(out < 0 ? -out : out) >= Fe::kHalfRange) {
    throw OverflowError("rescaled magnitude exceeds half range");
  }
  return Fe::from_signed(out);
}

}  // namespace zkeval
