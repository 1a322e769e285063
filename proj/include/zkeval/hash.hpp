#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "zkeval/bytes.hpp"

namespace zkeval {

using Digest = std::array<uint8_t, 32>;

Digest sha256(std::span<const uint8_t> data);
Digest sha256(std::string_view data);

// Incremental SHA-256 (OpenSSL EVP underneath).
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const uint8_t> data);
  Sha256& update(std::string_view data);
  Sha256& update(const Digest& d) { return update(std::span<const uint8_t>(d)); }
  Sha256& update_u64(uint64_t v);
  Digest finish();

 private:
  void* ctx_;
};

std::string to_hex(std::span<const uint8_t> data);
Digest digest_from_hex(std::string_view hex);

std::string base64_encode(std::span<const uint8_t> data);
Bytes base64_decode(std::string_view text);

}  // namespace zkeval
