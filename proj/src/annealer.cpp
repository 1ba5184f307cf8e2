#include "mclc/annealer.hpp"

#include <algorithm>
#include <cmath>

namespace mclc {

void AnnealConfig::validate() const {
  if (!(beta < 0.0)) throw ParameterError("beta: RD slope must be negative");
  if (!(c > 0.0)) throw ParameterError("c: schedule constant must be positive");
  if (r < 1) throw ParameterError("r: need at least one super-iteration");
}

double distortion(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ParameterError("distortion: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return x.empty() ? 0.0 : sum / static_cast<double>(x.size());
}

double energy(const SignalBuffer& x, std::span<const Symbol> z,
              std::span<const double> levels, std::uint32_t k, double beta) {
  if (x.size() != z.size()) throw ParameterError("energy: length mismatch");
  ContextCountTable table(z, k, static_cast<std::uint32_t>(levels.size()));
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double d = x.samples[i] - levels[z[i]];
    sum_sq += d * d;
  }
  return table.nh() - beta * sum_sq;
}

GibbsState::GibbsState(const SignalBuffer& x, std::vector<double> levels,
                       std::vector<Symbol> y, std::uint32_t k, double beta)
    : x_(&x),
      levels_(std::move(levels)),
      beta_(beta),
      y_(std::move(y)),
      counts_(y_, k, static_cast<std::uint32_t>(levels_.size())) {
  if (y_.size() != x.size())
    throw ParameterError("GibbsState: sequence length mismatch");
  dnh_.resize(levels_.size());
  pmf_.resize(levels_.size());
  perm_.resize(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i)
    perm_[i] = static_cast<std::uint32_t>(i);
  rebuild_numerics();
}

void GibbsState::rebuild_numerics() {
  counts_.rebuild_caches();
  sum_sq_ = 0.0;
  for (std::size_t i = 0; i < y_.size(); ++i) {
    const double d = x_->samples[i] - levels_[y_[i]];
    sum_sq_ += d * d;
  }
}

void GibbsState::gibbs_conditional(std::size_t i, double s,
                                   std::span<double> out) const {
  const std::uint32_t m = alphabet_size();
  counts_.delta_nh_all(y_, i, dnh_);
  const double xi = x_->samples[i];
  const Symbol a = y_[i];
  const double da = (levels_[a] - xi) * (levels_[a] - xi);

  double max_u = 0.0;  // candidate b == a has exponent 0
  for (Symbol b = 0; b < m; ++b) {
    const double db = (levels_[b] - xi) * (levels_[b] - xi);
    const double u = -s * (dnh_[b] - beta_ * (db - da));
    out[b] = u;
    if (u > max_u) max_u = u;
  }
  double sum = 0.0;
  for (Symbol b = 0; b < m; ++b) {
    out[b] = std::exp(out[b] - max_u);
    sum += out[b];
  }
  for (Symbol b = 0; b < m; ++b) out[b] /= sum;
}

void GibbsState::resample(std::size_t i, double s, Pcg32& rng) {
  const std::uint32_t m = alphabet_size();
  gibbs_conditional(i, s, pmf_);
  const double u = rng.next_double();
  double cum = 0.0;
  Symbol pick = m - 1;
  for (Symbol b = 0; b < m; ++b) {
    cum += pmf_[b];
    if (u < cum) {
      pick = b;
      break;
    }
  }
  const Symbol a = y_[i];
  if (pick != a) {
    const double xi = x_->samples[i];
    const double da = (levels_[a] - xi) * (levels_[a] - xi);
    const double db = (levels_[pick] - xi) * (levels_[pick] - xi);
    counts_.apply_substitution(y_, i, pick);
    sum_sq_ += db - da;
  }
}

void GibbsState::super_iteration(double s, Pcg32& rng) {
  const std::size_t n = y_.size();
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::uint32_t j = rng.bounded(static_cast<std::uint32_t>(i + 1));
    std::swap(perm_[i], perm_[j]);
  }
  for (std::size_t t = 0; t < n; ++t) resample(perm_[t], s, rng);
  rebuild_numerics();
}

std::vector<Symbol> run_fixed_annealer(const SignalBuffer& x,
                                       std::vector<double> levels,
                                       const AnnealConfig& cfg) {
  cfg.validate();
  std::vector<Symbol> init = quantize_to_levels(x.samples, levels);
  GibbsState state(x, std::move(levels), std::move(init), cfg.k, cfg.beta);
  Pcg32 rng = substream(cfg.seed, 0xa1);
  for (std::uint32_t t = 1; t <= cfg.r; ++t)
    state.super_iteration(cfg.schedule(t), rng);
  return state.y();
}

std::vector<Symbol> run_algorithm1(const SignalBuffer& x,
                                   const ReproductionGrid& grid,
                                   const AnnealConfig& cfg) {
  return run_fixed_annealer(x, grid.levels, cfg);
}

}  // namespace mclc
