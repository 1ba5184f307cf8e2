#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mclc/arith.hpp"
#include "mclc/ctw.hpp"
#include "mclc/entropy.hpp"
#include "mclc/random.hpp"
#include "oracles.hpp"

using namespace mclc;

namespace {

std::vector<Symbol> random_sequence(std::size_t n, std::uint32_t m, Pcg32& rng) {
  std::vector<Symbol> z(n);
  for (auto& s : z) s = rng.bounded(m);
  return z;
}

}  // namespace

TEST_CASE("arithmetic coder roundtrips a skewed stream") {
  Pcg32 rng(21, 5);
  const std::uint32_t total = kMaxArithTotal;
  const std::uint32_t f1 = total / 16;
  std::vector<int> bits;
  Bitstream stream;
  {
    ArithmeticEncoder enc(stream);
    for (int i = 0; i < 5000; ++i) {
      const int b = rng.next_double() < 0.0625 ? 1 : 0;
      bits.push_back(b);
      if (b)
        enc.encode(total - f1, f1, total);
      else
        enc.encode(0, total - f1, total);
    }
    enc.finish();
  }
  // about h(1/16) ~ 0.337 bits per symbol
  CHECK(stream.bit_count < 5000 * 0.4);
  BitReader reader(stream);
  ArithmeticDecoder dec(reader);
  for (int i = 0; i < 5000; ++i) {
    const std::uint32_t target = dec.decode_target(total);
    const int b = target >= total - f1 ? 1 : 0;
    CHECK(b == bits[static_cast<std::size_t>(i)]);
    if (b)
      dec.consume(total - f1, f1, total);
    else
      dec.consume(0, total - f1, total);
  }
}

TEST_CASE("ctw roundtrip over random configurations") {
  Pcg32 rng(22, 5);
  for (int rep = 0; rep < 100; ++rep) {
    const std::uint32_t m = 2 + rng.bounded(7);
    const std::uint32_t d = rng.bounded(5);
    const std::size_t n = 1 + rng.bounded(400);
    const auto z = random_sequence(n, m, rng);
    const Bitstream bits = ctw_encode(z, d, m);
    CHECK(ctw_decode(bits, n, d, m) == z);
  }
}

TEST_CASE("ctw rejects out-of-range symbols") {
  const std::vector<Symbol> z{0, 1, 5};
  CHECK_THROWS_AS(ctw_encode(z, 1, 3), ParameterError);
}

TEST_CASE("all-zero binary input codes within the hand KT bound") {
  const std::vector<Symbol> z(64, 0);
  // KT cost of a 64-run plus at most one bit of weighting loss per tree
  // level; termination adds two bits plus follows.
  const double kt_bits = oracles::kt_all_zero_bits(64);
  CHECK(kt_bits == doctest::Approx(4.1).epsilon(0.03));

  const double ideal = ctw_ideal_codelength(z, 2, 2);
  CHECK(ideal <= kt_bits + 3.0);
  const Bitstream bits = ctw_encode(z, 2, 2);
  CHECK(bits.bit_count <= 10);
  CHECK(ctw_decode(bits, 64, 2, 2) == z);
}

TEST_CASE("depth-0 ideal codelength equals the KT product") {
  const std::vector<Symbol> z(64, 0);
  CHECK(ctw_ideal_codelength(z, 0, 2) ==
        doctest::Approx(oracles::kt_all_zero_bits(64)).epsilon(0.002));
}

TEST_CASE("iid uniform rate approaches log2 M") {
  Pcg32 rng(23, 5);
  const std::uint32_t m = 4;
  const auto z = random_sequence(10000, m, rng);
  const double rate = ctw_ideal_codelength(z, 3, m) / 10000.0;
  CHECK(std::fabs(rate - 2.0) < 0.05);
  const Bitstream bits = ctw_encode(z, 3, m);
  CHECK(std::fabs(static_cast<double>(bits.bit_count) / 10000.0 - 2.0) < 0.05);
}

TEST_CASE("coded length exceeds the ideal by at most the slack budget") {
  Pcg32 rng(24, 5);
  for (int rep = 0; rep < 40; ++rep) {
    const std::uint32_t m = 2 + rng.bounded(8);
    const std::uint32_t d = rng.bounded(4);
    const std::size_t n = 1 + rng.bounded(3000);
    // a mix of uniform and strongly skewed sources
    std::vector<Symbol> z(n);
    const bool skew = rng.next_double() < 0.5;
    for (auto& s : z)
      s = skew ? (rng.next_double() < 0.9 ? 0 : rng.bounded(m)) : rng.bounded(m);
    const double ideal = ctw_ideal_codelength(z, d, m);
    CHECK(ideal >= 0.0);
    const Bitstream bits = ctw_encode(z, d, m);
    const double slack = static_cast<double>(bits.bit_count) - ideal;
    CHECK(slack >= 0.0);
    CHECK(slack <= 32.0);
  }
}

TEST_CASE("empty input codes to an empty stream") {
  const std::vector<Symbol> z;
  const Bitstream bits = ctw_encode(z, 3, 4);
  CHECK(bits.bit_count == 0);
  CHECK(ctw_decode(bits, 0, 3, 4).empty());
}

TEST_CASE("truncation is detected, never silently misdecoded") {
  Pcg32 rng(25, 5);
  const auto z = random_sequence(600, 4, rng);
  Bitstream bits = ctw_encode(z, 2, 4);
  REQUIRE(bits.bytes.size() > 1);
  Bitstream cut = bits;
  cut.bytes.pop_back();
  cut.bit_count = 8 * cut.bytes.size();
  CHECK_THROWS_AS(ctw_decode(cut, 600, 2, 4), DecodeError);
}

TEST_CASE("encoding is deterministic") {
  Pcg32 rng(26, 5);
  const auto z = random_sequence(500, 5, rng);
  const Bitstream a = ctw_encode(z, 2, 5);
  const Bitstream b = ctw_encode(z, 2, 5);
  CHECK(a == b);
}

TEST_CASE("ctw reaches the empirical entropy of a markov source") {
  // Binary order-1 Markov chain with flip probability 0.1.
  Pcg32 rng(27, 5);
  std::vector<Symbol> z(10000);
  Symbol state = 0;
  for (auto& s : z) {
    if (rng.next_double() < 0.1) state ^= 1u;
    s = state;
  }
  for (std::uint32_t d : {1u, 2u, 3u}) {
    const double rate = ctw_ideal_codelength(z, d, 2) / 10000.0;
    const double hk = conditional_entropy(z, d, 2).bits_per_symbol;
    CHECK(rate - hk >= -1e-9);
    CHECK(rate - hk <= 0.1);
  }
}

TEST_CASE("pmf quantization is exact-total and strictly positive") {
  Pcg32 rng(28, 5);
  for (int rep = 0; rep < 200; ++rep) {
    const std::uint32_t m = 2 + rng.bounded(30);
    std::vector<double> p(m);
    double sum = 0.0;
    for (auto& v : p) {
      v = std::pow(rng.next_double(), 6.0) + 1e-12;
      sum += v;
    }
    for (auto& v : p) v /= sum;
    std::vector<std::uint32_t> f(m);
    quantize_pmf(p, f);
    std::uint64_t total = 0;
    for (std::uint32_t v : f) {
      CHECK(v >= 1);
      total += v;
    }
    CHECK(total == kMaxArithTotal);
  }
}
