#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mclc/entropy.hpp"
#include "mclc/grid.hpp"
#include "mclc/random.hpp"
#include "mclc/sources.hpp"

namespace mclc {

/// Annealing parameters shared by both encoders. The inverse-temperature
/// schedule is s(t) = c * log2(t), so the first super-iteration (t = 1) is a
/// pure randomization sweep.
struct AnnealConfig {
  double beta = -1.0;   // RD slope, < 0
  double c = 1.0;       // schedule constant, > 0
  std::uint32_t r = 50; // super-iterations, >= 1
  std::uint32_t k = 0;  // context depth
  std::uint64_t seed = 0;

  double schedule(std::uint32_t t) const {
    return c * std::log2(static_cast<double>(t));
  }
  void validate() const;
};

/// Mean squared error between two equal-length real sequences.
double distortion(std::span<const double> x, std::span<const double> y);

/// Direct evaluation of the fixed-alphabet energy
/// n * [H_k(z) - beta * d_n(x, levels(z))]. Used as the bookkeeping oracle.
double energy(const SignalBuffer& x, std::span<const Symbol> z,
              std::span<const double> levels, std::uint32_t k, double beta);

/// Gibbs-sampler state for the fixed reproduction alphabet: the symbol
/// sequence, its context counts, and the incrementally tracked energy.
class GibbsState {
 public:
  GibbsState(const SignalBuffer& x, std::vector<double> levels,
             std::vector<Symbol> y, std::uint32_t k, double beta);

  std::uint32_t alphabet_size() const { return static_cast<std::uint32_t>(levels_.size()); }
  const std::vector<Symbol>& y() const { return y_; }
  const std::vector<double>& levels() const { return levels_; }
  const ContextCountTable& counts() const { return counts_; }

  /// n*[H_k - beta*d_n], tracked incrementally across moves.
  double current_energy() const { return counts_.nh() - beta_ * sum_sq_; }

  /// Resampling pmf of position i at inverse temperature s: each candidate
  /// level b gets weight exp(-s * [n dH_k(a -> b) - beta dd(b, a, x_i)]),
  /// evaluated in log space with max subtraction. s = 0 gives the uniform
  /// pmf.
  void gibbs_conditional(std::size_t i, double s, std::span<double> out) const;

  /// One Gibbs draw at position i: one uniform variate, CDF inversion in
  /// level order.
  void resample(std::size_t i, double s, Pcg32& rng);

  /// One full pass over a fresh random permutation of all n positions.
  void super_iteration(double s, Pcg32& rng);

  /// Clears accumulated floating-point drift in the tracked sums.
  void rebuild_numerics();

 private:
  const SignalBuffer* x_;
  std::vector<double> levels_;
  double beta_;
  std::vector<Symbol> y_;
  ContextCountTable counts_;
  double sum_sq_ = 0.0;  // n * d_n(x, levels(y))
  mutable std::vector<double> dnh_;
  mutable std::vector<double> pmf_;
  std::vector<std::uint32_t> perm_;
};

/// Algorithm fixed-alphabet encoder loop: quantize x onto the level set, then
/// run r super-iterations with s = c*log2(t). Returns the final symbol
/// sequence over `levels`.
std::vector<Symbol> run_fixed_annealer(const SignalBuffer& x,
                                       std::vector<double> levels,
                                       const AnnealConfig& cfg);

/// Same with the data-independent grid of build_grid.
std::vector<Symbol> run_algorithm1(const SignalBuffer& x,
                                   const ReproductionGrid& grid,
                                   const AnnealConfig& cfg);

}  // namespace mclc
