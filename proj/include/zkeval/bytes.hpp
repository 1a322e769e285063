#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zkeval/errors.hpp"
#include "zkeval/field.hpp"

namespace zkeval {

using Bytes = std::vector<uint8_t>;

// Little-endian binary writer used by every on-disk artifact.
class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u32(uint32_t v) { put(v); }
  void u64(uint64_t v) { put(v); }
  void i64(int64_t v) { put(static_cast<uint64_t>(v)); }
  void f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put(bits);
  }
  void fe(Fe v) { put(v.value()); }
  void raw(std::span<const uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  void blob(std::span<const uint8_t> data) {
    u64(data.size());
    raw(data);
  }
  void str(std::string_view s) {
    u64(s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  const Bytes& bytes() const { return buf_; }
  Bytes take() { return std::move(buf_); }
  size_t size() const { return buf_.size(); }

 private:
  template <typename T>
  void put(T v) {
    for (size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  Bytes buf_;
};

// Strict reader: every short read or non-canonical value throws FormatError.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t u8() { return get<uint8_t>(); }
  uint32_t u32() { return get<uint32_t>(); }
  uint64_t u64() { return get<uint64_t>(); }
  int64_t i64() { return static_cast<int64_t>(get<uint64_t>()); }
  double f64() {
    uint64_t bits = get<uint64_t>();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  Fe fe() {
    Fe out;
    if (!Fe::from_canonical(get<uint64_t>(), &out)) throw FormatError("non-canonical field element");
    return out;
  }
  bool boolean() {
    uint8_t b = u8();
    if (b > 1) throw FormatError("invalid boolean byte");
    return b == 1;
  }
  std::span<const uint8_t> raw(size_t n) {
    need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  Bytes blob() {
    uint64_t n = u64();
    auto s = raw(checked_len(n));
    return Bytes(s.begin(), s.end());
  }
  std::string str() {
    uint64_t n = u64();
    auto s = raw(checked_len(n));
    return std::string(s.begin(), s.end());
  }
  // Length prefix for `n` items of at least `min_item_bytes` each.
  size_t count(size_t min_item_bytes = 1) {
    uint64_t n = u64();
    if (min_item_bytes && n > remaining() / min_item_bytes) throw FormatError("count exceeds payload");
    return static_cast<size_t>(n);
  }

  size_t remaining() const { return data_.size() - pos_; }
  void expect_end() const {
    if (remaining() != 0) throw FormatError("trailing bytes");
  }

 private:
  size_t checked_len(uint64_t n) {
    if (n > remaining()) throw FormatError("length prefix exceeds payload");
    return static_cast<size_t>(n);
  }
  void need(size_t n) {
    if (n > remaining()) throw FormatError("unexpected end of data");
  }
  template <typename T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

Bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const uint8_t> data);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace zkeval
