#include <doctest.h>

#include <random>

#include "zkeval/errors.hpp"
#include "zkeval/field.hpp"

using zkeval::Fe;

namespace {

constexpr uint64_t P = 0xFFFFFFFF00000001ULL;

uint64_t mulmod(uint64_t a, uint64_t b) { return static_cast<uint64_t>((unsigned __int128)a * b % P); }

// Extended Euclid over signed 128-bit integers.
uint64_t inverse_oracle(uint64_t a) {
  __int128 t = 0, nt = 1, r = P, nr = a;
  while (nr != 0) {
    __int128 q = r / nr;
    __int128 tmp = t - q * nt;
    t = nt, nt = tmp;
    tmp = r - q * nr;
    r = nr, nr = tmp;
  }
  if (t < 0) t += P;
  return static_cast<uint64_t>(t);
}

}  // namespace

TEST_SUITE("field") {
  TEST_CASE("arithmetic agrees with 128-bit modular arithmetic") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 2000; ++i) {
      uint64_t a = rng() % P, b = rng() % P;
      CHECK((Fe(a) + Fe(b)).value() == static_cast<uint64_t>(((unsigned __int128)a + b) % P));
      CHECK((Fe(a) - Fe(b)).value() == static_cast<uint64_t>(((unsigned __int128)a + P - b) % P));
      CHECK((Fe(a) * Fe(b)).value() == mulmod(a, b));
    }
  }

  TEST_CASE("edge values near the modulus") {
    CHECK(Fe(P).value() == 0);
    CHECK((Fe(P - 1) + Fe(1)).value() == 0);
    CHECK((Fe(P - 1) * Fe(P - 1)).value() == 1);
    CHECK((Fe(0) - Fe(1)).value() == P - 1);
  }

  TEST_CASE("inverse matches extended Euclid") {
    CHECK(Fe(2).inverse().value() == (P + 1) / 2);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 500; ++i) {
      uint64_t a = 1 + rng() % (P - 1);
      CHECK(Fe(a).inverse().value() == inverse_oracle(a));
      CHECK((Fe(a) * Fe(a).inverse()).value() == 1);
    }
    CHECK(Fe(0).inverse().value() == 0);
  }

  TEST_CASE("Fermat: a^(p-1) = 1") {
    CHECK(Fe(7).pow(P - 1).value() == 1);
    CHECK(Fe(123456789).pow(P - 1).value() == 1);
  }

  TEST_CASE("centered lift") {
    CHECK(Fe::from_signed(-1).value() == P - 1);
    CHECK(Fe::from_signed(-1).to_signed() == -1);
    CHECK(Fe(Fe::kHalfRange).to_signed() == static_cast<int64_t>(Fe::kHalfRange));
    CHECK(Fe(Fe::kHalfRange + 1).to_signed() == -static_cast<int64_t>(Fe::kHalfRange));
    Fe out;
    CHECK_FALSE(Fe::from_canonical(P, &out));
    CHECK(Fe::from_canonical(P - 1, &out));
  }

  TEST_CASE("fixed-point encode, decode and rescale") {
    CHECK(zkeval::encode_raw(1.5, 7) == 192);
    CHECK(zkeval::encode_raw(-0.5, 7) == -64);
    CHECK(zkeval::encode_raw(1.0 / 256, 7) == 1);    // half rounds away from zero
    CHECK(zkeval::encode_raw(-1.0 / 256, 7) == -1);
    CHECK(zkeval::decode_raw(192, 7) == 1.5);
    CHECK(zkeval::decode(zkeval::encode(-2.25, {4}), {4}) == -2.25);
    CHECK(zkeval::floor_shift(3, 1) == 1);
    CHECK(zkeval::floor_shift(-3, 1) == -2);
    CHECK(zkeval::rescale(Fe::from_signed(-3), 1, 0).to_signed() == -2);
    CHECK(zkeval::rescale(Fe::from_signed(1000), 10, 7).to_signed() == 125);
    CHECK_THROWS_AS(zkeval::encode(1e30, {7}), zkeval::OverflowError);
  }
}
