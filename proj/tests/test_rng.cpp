#include <doctest.h>

#include <cstdint>
#include <vector>

#include "pairqfi/rng.hpp"

using namespace pairqfi;

TEST_SUITE("rng") {

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Test vectors published with the reference implementation of the
  // algorithm (Salmon et al., SC 2011).
  const auto zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  const auto ones = Philox4x32::block(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
      {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);

  const auto pi_digits = Philox4x32::block(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
      {0xa4093822u, 0x299f31d0u});
  CHECK(pi_digits[0] == 0xd16cfe09u);
  CHECK(pi_digits[1] == 0x94fdccebu);
  CHECK(pi_digits[2] == 0x5001e420u);
  CHECK(pi_digits[3] == 0x24126ea1u);
}

TEST_CASE("streams are reproducible and order-independent") {
  Philox4x32 a(42, 7);
  Philox4x32 b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());

  // consuming one stream does not perturb another
  Philox4x32 first(42, 1);
  std::vector<std::uint64_t> expected;
  for (int i = 0; i < 16; ++i) expected.push_back(first());

  Philox4x32 other(42, 2);
  for (int i = 0; i < 1000; ++i) (void)other();
  Philox4x32 again(42, 1);
  for (int i = 0; i < 16; ++i) CHECK(again() == expected[static_cast<std::size_t>(i)]);
}

TEST_CASE("distinct seeds and streams decorrelate") {
  Philox4x32 a(1, 0);
  Philox4x32 b(2, 0);
  Philox4x32 c(1, 1);
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const auto va = a();
    if (va == b()) ++equal_ab;
    if (va == c()) ++equal_ac;
  }
  CHECK(equal_ab == 0);
  CHECK(equal_ac == 0);
}

TEST_CASE("uniform_double stays inside its interval") {
  Philox4x32 rng(9, 9);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform_double(rng, -1.0, 1.0);
    CHECK(u >= -1.0);
    CHECK(u < 1.0);
  }
}

}  // TEST_SUITE
