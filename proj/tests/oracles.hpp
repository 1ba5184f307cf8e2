// Independent brute-force reference implementations used by the tests. These
// deliberately follow the definitions directly (nested loops, maps, full
// recomputation) and share no code with the library's incremental paths.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mclc/common.hpp"

namespace oracles {

using mclc::Symbol;

// n * H_k from the count definition: positions p with full left context,
// counts keyed by (context tuple, symbol).
inline double brute_nh(std::span<const Symbol> z, std::uint32_t k) {
  std::map<std::pair<std::vector<Symbol>, Symbol>, std::uint64_t> counts;
  std::map<std::vector<Symbol>, std::uint64_t> totals;
  const std::size_t n = z.size();
  for (std::size_t p = k; p < n; ++p) {
    std::vector<Symbol> ctx(z.begin() + static_cast<std::ptrdiff_t>(p - k),
                            z.begin() + static_cast<std::ptrdiff_t>(p));
    ++counts[{ctx, z[p]}];
    ++totals[ctx];
  }
  double nh = 0.0;
  for (const auto& [key, m] : counts) {
    const double t = static_cast<double>(totals.at(key.first));
    nh -= static_cast<double>(m) *
          std::log2(static_cast<double>(m) / t);
  }
  return nh;
}

inline double brute_hk(std::span<const Symbol> z, std::uint32_t k) {
  return brute_nh(z, k) / static_cast<double>(z.size());
}

// Mean squared error by naive summation.
inline double brute_mse(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

// Fixed-alphabet energy from the definitions.
inline double brute_energy(std::span<const double> x, std::span<const Symbol> z,
                           std::span<const double> levels, std::uint32_t k,
                           double beta) {
  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = levels[z[i]];
  const double n = static_cast<double>(x.size());
  return brute_nh(z, k) - beta * n * brute_mse(x, y);
}

// Conditional means per symbol class, straight from the definition.
inline std::vector<std::optional<double>> brute_class_means(
    std::span<const double> x, std::span<const Symbol> z, std::uint32_t m) {
  std::vector<double> sum(m, 0.0);
  std::vector<std::uint64_t> cnt(m, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum[z[i]] += x[i];
    ++cnt[z[i]];
  }
  std::vector<std::optional<double>> means(m);
  for (std::uint32_t a = 0; a < m; ++a)
    if (cnt[a]) means[a] = sum[a] / static_cast<double>(cnt[a]);
  return means;
}

// d_a by the direct definition: quantized class means applied pointwise.
template <typename Quantize>
double brute_da(std::span<const double> x, std::span<const Symbol> z,
                std::uint32_t m, Quantize&& quantize) {
  const auto means = brute_class_means(x, z, m);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double level = quantize(*means[z[i]]);
    s += (x[i] - level) * (x[i] - level);
  }
  return s / static_cast<double>(x.size());
}

// eps_a from the definitions (penalty term optional).
template <typename Quantize>
double brute_adaptive_energy(std::span<const double> x,
                             std::span<const Symbol> z, std::uint32_t m,
                             std::uint32_t k, double beta, double mu,
                             bool penalty, Quantize&& quantize) {
  const double n = static_cast<double>(x.size());
  double e = brute_nh(z, k) - beta * n * brute_da(x, z, m, quantize);
  if (penalty) {
    std::vector<std::uint64_t> cnt(m, 0);
    for (Symbol s : z) ++cnt[s];
    std::uint32_t occupied = 0;
    for (std::uint64_t c : cnt)
      if (c) ++occupied;
    e += mu * std::log2(std::log2(n)) * static_cast<double>(occupied);
  }
  return e;
}

// All M^n sequences of length n, for exhaustive minimizers and Boltzmann
// distributions on desk-scale instances.
inline std::vector<std::vector<Symbol>> all_sequences(std::size_t n,
                                                      std::uint32_t m) {
  std::vector<std::vector<Symbol>> out;
  std::vector<Symbol> cur(n, 0);
  for (;;) {
    out.push_back(cur);
    std::size_t i = 0;
    while (i < n && ++cur[i] == m) cur[i++] = 0;
    if (i == n) break;
  }
  return out;
}

// KT sequence probability of an all-identical run of length n over a binary
// alphabet: prod_i (i + 1/2) / (i + 1).
inline double kt_all_zero_bits(std::size_t n) {
  double bits = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    bits -= std::log2((static_cast<double>(i) + 0.5) /
                      (static_cast<double>(i) + 1.0));
  return bits;
}

}  // namespace oracles
