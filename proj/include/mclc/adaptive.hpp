#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mclc/annealer.hpp"
#include "mclc/entropy.hpp"
#include "mclc/grid.hpp"
#include "mclc/random.hpp"
#include "mclc/sources.hpp"

namespace mclc {

/// Per-symbol running moments of x over the positions assigned to each
/// symbol: X0 (count), X1 (sum), X2 (sum of squares).
struct MomentTable {
  std::vector<std::uint64_t> x0;
  std::vector<double> x1;
  std::vector<double> x2;

  static MomentTable build(std::span<const double> x, std::span<const Symbol> z,
                           std::uint32_t m);
  std::uint32_t occupied() const;
};

/// The b-bit ceiling lattice used to describe reproduction levels: step 1/D
/// with D = (2^b - 1)/(2*gamma) over [-gamma, gamma], so every clamped level
/// has a b-bit index.
struct LevelQuantizer {
  double mu = 4.0;
  std::uint32_t bits = 8;
  std::uint32_t gamma = 1;
  double delta = 1.0;  // levels live on multiples of 1/delta
  std::int64_t min_index = 0;
  std::int64_t max_index = 0;

  /// bits = max(8, ceil(mu * log2(log2(n)))); requires n >= 4.
  static LevelQuantizer for_length(std::uint64_t n, double mu);
  static LevelQuantizer from_bits(std::uint32_t bits, std::uint32_t gamma,
                                  double mu);

  /// ceil(level * delta), snapped to the lattice for values within one part
  /// in 1e9 of a lattice point, then clamped to the representable range.
  std::int64_t quantize_index(double level) const;
  double level_of_index(std::int64_t m) const {
    return static_cast<double>(m) / delta;
  }
  double quantize(double level) const {
    return level_of_index(quantize_index(level));
  }
  std::uint64_t pack_index(std::int64_t m) const {
    return static_cast<std::uint64_t>(m - min_index);
  }
  std::int64_t unpack_index(std::uint64_t raw) const;
};

/// The transmitted description of an adaptive code: which symbols occur and
/// the quantized reproduction level of each.
struct AdaptiveCodebook {
  LevelQuantizer quantizer;
  std::vector<Symbol> effective;          // occupied symbols, ascending
  std::vector<std::int64_t> level_index;  // lattice index per occupied symbol
  std::vector<double> levels;             // level_of_index of each
};

/// Conditional mean of x over each symbol class; empty classes get nullopt.
std::vector<std::optional<double>> conditional_mean_levels(
    std::span<const double> x, std::span<const Symbol> z, std::uint32_t m);

/// Ceiling-quantizes a level map with the given quantizer.
std::vector<std::optional<double>> quantize_levels(
    std::span<const std::optional<double>> levels, const LevelQuantizer& q);

/// d_a by the pointwise definition: squared error against the quantized
/// class-mean level of each position's symbol.
double adaptive_distortion_direct(std::span<const double> x,
                                  std::span<const Symbol> z, std::uint32_t m,
                                  const LevelQuantizer& q);

struct AdaptiveConfig {
  AnnealConfig anneal;
  double mu = 4.0;
  /// When false (the default, matching the benchmark mode) the
  /// mu*log2(log2(n))*|Z_e| term is dropped from the energy and the sampler.
  bool alphabet_penalty = false;

  void validate(std::uint64_t n) const;
};

/// Gibbs state for the adaptive-alphabet encoder: symbol sequence, context
/// counts, moment tables, cached per-symbol quantized levels and distortion
/// contributions, and the tracked energy.
class AdaptiveState {
 public:
  AdaptiveState(const SignalBuffer& x, std::vector<Symbol> z, std::uint32_t m,
                const AdaptiveConfig& cfg);

  std::uint32_t alphabet_size() const { return m_; }
  const std::vector<Symbol>& z() const { return z_; }
  const ContextCountTable& counts() const { return counts_; }
  const LevelQuantizer& quantizer() const { return quant_; }
  std::uint32_t effective_size() const { return occupied_; }

  /// d_a(x, z) computed from the moment expansion.
  double adaptive_distortion() const {
    return sum_contrib_ / static_cast<double>(z_.size());
  }

  /// n * [d_a(z with z_i := b) - d_a(z)], levels re-derived on both sides.
  double delta_adaptive_distortion(std::size_t i, Symbol b) const;

  /// Change in |Z_e| if z_i := b (-1, 0 or +1).
  int delta_effective(std::size_t i, Symbol b) const;

  /// eps_a = n[H_k - beta d_a] (+ mu log2 log2 n |Z_e| when the penalty is
  /// on), tracked incrementally.
  double current_energy() const;

  void gibbs_conditional(std::size_t i, double s, std::span<double> out) const;
  void resample(std::size_t i, double s, Pcg32& rng);
  void super_iteration(double s, Pcg32& rng);
  void rebuild_numerics();

  /// Quantized levels of the occupied symbols, in ascending symbol order.
  AdaptiveCodebook codebook() const;

  double quantized_level(Symbol a) const { return aq_[a]; }
  MomentTable moments() const;

 private:
  void refresh_symbol(Symbol a);
  /// Contribution of symbol a to n*d_a after a hypothetical moment change.
  double hypo_contrib(Symbol a, int dc, double dx1, double dx2) const;

  const SignalBuffer* x_;
  std::vector<Symbol> z_;
  std::uint32_t m_;
  double beta_;
  double mu_;
  bool penalty_;
  double penalty_weight_ = 0.0;  // mu * log2(log2(n)) when enabled
  LevelQuantizer quant_;
  ContextCountTable counts_;

  std::vector<std::uint64_t> x0_;
  std::vector<double> x1_;
  std::vector<double> x2_;
  std::vector<double> aq_;       // quantized level, 0 for empty symbols
  std::vector<double> contrib_;  // X2 - 2 aq X1 + aq^2 X0
  double sum_contrib_ = 0.0;     // n * d_a
  std::uint32_t occupied_ = 0;

  mutable std::vector<double> dnh_;
  mutable std::vector<double> pmf_;
  std::vector<std::uint32_t> perm_;
};

/// Direct (non-incremental) evaluation of eps_a for oracle use.
double adaptive_energy(const SignalBuffer& x, std::span<const Symbol> z,
                       std::uint32_t m, const AdaptiveConfig& cfg);

struct AdaptiveResult {
  std::vector<Symbol> z;
  AdaptiveCodebook codebook;
  double final_energy = 0.0;
};

/// Initial symbol sequence for the adaptive encoder: quantization of x onto
/// the data-independent grid when M matches its cardinality, otherwise onto M
/// uniform levels spanning [min(x), max(x)].
std::vector<Symbol> adaptive_initial_sequence(const SignalBuffer& x,
                                              std::uint32_t m);

/// Algorithm adaptive-alphabet encoder loop over |Z| = m symbols.
AdaptiveResult run_algorithm2(const SignalBuffer& x, std::uint32_t m,
                              const AdaptiveConfig& cfg);

/// Same, continuing from a caller-provided initial sequence (warm starts).
AdaptiveResult run_algorithm2_from(const SignalBuffer& x,
                                   std::vector<Symbol> z0, std::uint32_t m,
                                   const AdaptiveConfig& cfg);

}  // namespace mclc
