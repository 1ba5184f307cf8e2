#include "mclc/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace mclc {

std::uint32_t grid_gamma(std::uint64_t n) {
  if (n < 2) throw ParameterError("n: grid requires n >= 2");
  // ceil(log2 n) without floating point: bit_width(n-1).
  return static_cast<std::uint32_t>(std::bit_width(n - 1));
}

std::uint32_t default_alphabet_size(std::uint64_t n) {
  const std::uint64_t g = grid_gamma(n);
  return static_cast<std::uint32_t>(2 * g * g + 1);
}

ReproductionGrid build_grid(std::uint64_t n) {
  ReproductionGrid grid;
  grid.gamma = grid_gamma(n);
  const std::int64_t g = grid.gamma;
  const std::int64_t g2 = g * g;
  grid.levels.reserve(static_cast<std::size_t>(2 * g2 + 1));
  for (std::int64_t m = -g2; m <= g2; ++m)
    grid.levels.push_back(static_cast<double>(m) / static_cast<double>(g));
  return grid;
}

std::vector<Symbol> quantize_to_levels(std::span<const double> x,
                                       std::span<const double> levels) {
  if (levels.empty()) throw ParameterError("levels: must be nonempty");
  std::vector<Symbol> z;
  z.reserve(x.size());
  const std::size_t m = levels.size();
  for (double v : x) {
    // Binary search for the first level >= v, then compare neighbors.
    const auto it = std::lower_bound(levels.begin(), levels.end(), v);
    std::size_t idx;
    if (it == levels.begin()) {
      idx = 0;
    } else if (it == levels.end()) {
      idx = m - 1;
    } else {
      const std::size_t hi = static_cast<std::size_t>(it - levels.begin());
      const std::size_t lo = hi - 1;
      const double dlo = v - levels[lo];
      const double dhi = levels[hi] - v;
      idx = (dhi < dlo) ? hi : lo;  // ties go to the smaller level
    }
    z.push_back(static_cast<Symbol>(idx));
  }
  return z;
}

std::vector<Symbol> quantize_to_grid(const SignalBuffer& x,
                                     const ReproductionGrid& grid) {
  return quantize_to_levels(x.samples, grid.levels);
}

std::vector<double> uniform_levels(double lo, double hi, std::uint32_t m) {
  if (m < 1) throw ParameterError("m: need at least one level");
  std::vector<double> levels(m);
  if (m == 1) {
    levels[0] = 0.5 * (lo + hi);
    return levels;
  }
  if (hi <= lo) {
    std::fill(levels.begin(), levels.end(), lo);
    return levels;
  }
  const double step = (hi - lo) / static_cast<double>(m - 1);
  for (std::uint32_t i = 0; i < m; ++i)
    levels[i] = lo + step * static_cast<double>(i);
  levels[m - 1] = hi;
  return levels;
}

}  // namespace mclc
