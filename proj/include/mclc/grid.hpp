#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mclc/common.hpp"
#include "mclc/sources.hpp"

namespace mclc {

/// Data-independent reproduction alphabet: the interval [-gamma, gamma]
/// sampled at step 1/gamma, gamma = ceil(log2 n). Size 2*gamma^2 + 1.
struct ReproductionGrid {
  std::uint32_t gamma = 0;
  std::vector<double> levels;  // strictly increasing, symmetric about 0

  std::size_t size() const { return levels.size(); }
};

/// Abstract symbol alphabet for the adaptive encoder: symbols 0..M-1.
struct SymbolAlphabet {
  std::uint32_t size = 0;  // M >= 2
};

/// gamma = ceil(log2 n) computed exactly on integers.
std::uint32_t grid_gamma(std::uint64_t n);

/// Default |Z| = 2*ceil(log2 n)^2 + 1, the cardinality that matches the
/// data-independent grid.
std::uint32_t default_alphabet_size(std::uint64_t n);

/// Builds the data-independent grid for input length n (n >= 2).
ReproductionGrid build_grid(std::uint64_t n);

/// Nearest-level quantization over an ascending level set. Values beyond the
/// ends clamp; exact midpoints break toward the smaller level.
std::vector<Symbol> quantize_to_levels(std::span<const double> x,
                                       std::span<const double> levels);

std::vector<Symbol> quantize_to_grid(const SignalBuffer& x,
                                     const ReproductionGrid& grid);

/// M equally spaced levels spanning [lo, hi] (all equal to lo when lo == hi).
std::vector<double> uniform_levels(double lo, double hi, std::uint32_t m);

}  // namespace mclc
