#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mclc/random.hpp"

using mclc::Pcg32;

TEST_CASE("pcg32 matches the published reference stream") {
  // First outputs of pcg32_srandom_r(42, 54) from the PCG minimal C demo.
  Pcg32 rng(42u, 54u);
  const std::uint32_t expected[] = {0xa15c02b7u, 0x7b47f409u, 0xba1d3330u,
                                    0x83d2f293u, 0xbfa4784bu, 0xcbed606eu};
  for (std::uint32_t want : expected) CHECK(rng.next_u32() == want);
}

TEST_CASE("pcg32 streams are reproducible and seed-sensitive") {
  Pcg32 a(7, 1), b(7, 1), c(8, 1);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u32();
    all_equal = all_equal && (va == b.next_u32());
    any_diff = any_diff || (va != c.next_u32());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("next_double lies in [0,1)") {
  Pcg32 rng(3, 9);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("bounded draws are in range and hit every residue") {
  Pcg32 rng(11, 2);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 2000; ++i) {
    const std::uint32_t v = rng.bounded(7);
    REQUIRE(v < 7);
    ++seen[v];
  }
  for (int count : seen) CHECK(count > 0);
}

TEST_CASE("substream decorrelates task indices") {
  auto a = mclc::substream(5, 1, 2, 3);
  auto b = mclc::substream(5, 1, 2, 4);
  int diff = 0;
  for (int i = 0; i < 100; ++i) diff += a.next_u32() != b.next_u32();
  CHECK(diff > 90);
}

TEST_CASE("inverse normal cdf hits known quantiles") {
  CHECK(mclc::inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mclc::inverse_normal_cdf(0.8413447460685429) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mclc::inverse_normal_cdf(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(mclc::inverse_normal_cdf(0.001) ==
        doctest::Approx(-3.090232306167814).epsilon(1e-9));
  for (double p : {0.01, 0.2, 0.6, 0.99}) {
    CHECK(mclc::inverse_normal_cdf(p) ==
          doctest::Approx(-mclc::inverse_normal_cdf(1.0 - p)).epsilon(1e-9));
  }
}
