#include "mclc/adaptive.hpp"

#include <algorithm>
#include <cmath>

namespace mclc {

MomentTable MomentTable::build(std::span<const double> x,
                               std::span<const Symbol> z, std::uint32_t m) {
  if (x.size() != z.size()) throw ParameterError("moments: length mismatch");
  MomentTable t;
  t.x0.assign(m, 0);
  t.x1.assign(m, 0.0);
  t.x2.assign(m, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Symbol a = z[i];
    if (a >= m) throw ParameterError("moments: symbol out of range");
    t.x0[a] += 1;
    t.x1[a] += x[i];
    t.x2[a] += x[i] * x[i];
  }
  return t;
}

std::uint32_t MomentTable::occupied() const {
  std::uint32_t n = 0;
  for (std::uint64_t c : x0)
    if (c > 0) ++n;
  return n;
}

LevelQuantizer LevelQuantizer::for_length(std::uint64_t n, double mu) {
  if (n < 4) throw ParameterError("n: adaptive levels require n >= 4");
  if (!(mu > 0.0)) throw ParameterError("mu: must be positive");
  const double llog = std::log2(std::log2(static_cast<double>(n)));
  const std::uint32_t bits = std::max<std::uint32_t>(
      8, static_cast<std::uint32_t>(std::ceil(mu * llog)));
  return from_bits(bits, grid_gamma(n), mu);
}

LevelQuantizer LevelQuantizer::from_bits(std::uint32_t bits, std::uint32_t gamma,
                                         double mu) {
  if (bits < 2 || bits > 40) throw ParameterError("bits: unsupported level width");
  LevelQuantizer q;
  q.mu = mu;
  q.bits = bits;
  q.gamma = gamma;
  // 2^bits - 1 lattice steps across [-gamma, gamma].
  q.delta = (std::exp2(static_cast<double>(bits)) - 1.0) /
            (2.0 * static_cast<double>(gamma));
  q.max_index = (1ll << (bits - 1)) - 1;
  q.min_index = -q.max_index;
  return q;
}

std::int64_t LevelQuantizer::quantize_index(double level) const {
  const double v = level * delta;
  const double lo = std::floor(v);
  // Snap values that are a rounding error above a lattice point.
  const double tol = 1e-9 * std::max(1.0, std::fabs(v));
  std::int64_t m = (v - lo <= tol) ? static_cast<std::int64_t>(lo)
                                   : static_cast<std::int64_t>(lo) + 1;
  return std::clamp(m, min_index, max_index);
}

std::int64_t LevelQuantizer::unpack_index(std::uint64_t raw) const {
  const std::int64_t m = static_cast<std::int64_t>(raw) + min_index;
  if (m < min_index || m > max_index)
    throw DecodeError("level index out of range");
  return m;
}

std::vector<std::optional<double>> conditional_mean_levels(
    std::span<const double> x, std::span<const Symbol> z, std::uint32_t m) {
  const MomentTable t = MomentTable::build(x, z, m);
  std::vector<std::optional<double>> levels(m);
  for (std::uint32_t a = 0; a < m; ++a)
    if (t.x0[a] > 0) levels[a] = t.x1[a] / static_cast<double>(t.x0[a]);
  return levels;
}

std::vector<std::optional<double>> quantize_levels(
    std::span<const std::optional<double>> levels, const LevelQuantizer& q) {
  std::vector<std::optional<double>> out(levels.size());
  for (std::size_t a = 0; a < levels.size(); ++a)
    if (levels[a]) out[a] = q.quantize(*levels[a]);
  return out;
}

double adaptive_distortion_direct(std::span<const double> x,
                                  std::span<const Symbol> z, std::uint32_t m,
                                  const LevelQuantizer& q) {
  const auto means = conditional_mean_levels(x, z, m);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double level = q.quantize(*means[z[i]]);
    sum += (x[i] - level) * (x[i] - level);
  }
  return x.empty() ? 0.0 : sum / static_cast<double>(x.size());
}

void AdaptiveConfig::validate(std::uint64_t n) const {
  anneal.validate();
  if (n < 4) throw ParameterError("n: adaptive energy requires n >= 4");
  if (!(mu > 0.0)) throw ParameterError("mu: must be positive");
}

AdaptiveState::AdaptiveState(const SignalBuffer& x, std::vector<Symbol> z,
                             std::uint32_t m, const AdaptiveConfig& cfg)
    : x_(&x),
      z_(std::move(z)),
      m_(m),
      beta_(cfg.anneal.beta),
      mu_(cfg.mu),
      penalty_(cfg.alphabet_penalty),
      quant_(LevelQuantizer::for_length(x.size(), cfg.mu)),
      counts_(z_, cfg.anneal.k, m) {
  cfg.validate(x.size());
  if (m_ < 2) throw ParameterError("M: adaptive alphabet needs |Z| >= 2");
  if (z_.size() != x.size())
    throw ParameterError("AdaptiveState: sequence length mismatch");
  penalty_weight_ =
      penalty_ ? mu_ * std::log2(std::log2(static_cast<double>(x.size()))) : 0.0;
  x0_.assign(m_, 0);
  x1_.assign(m_, 0.0);
  x2_.assign(m_, 0.0);
  aq_.assign(m_, 0.0);
  contrib_.assign(m_, 0.0);
  dnh_.resize(m_);
  pmf_.resize(m_);
  perm_.resize(z_.size());
  for (std::size_t i = 0; i < z_.size(); ++i)
    perm_[i] = static_cast<std::uint32_t>(i);
  rebuild_numerics();
}

void AdaptiveState::refresh_symbol(Symbol a) {
  if (x0_[a] == 0) {
    aq_[a] = 0.0;
    contrib_[a] = 0.0;
    return;
  }
  const double mean = x1_[a] / static_cast<double>(x0_[a]);
  const double aq = quant_.quantize(mean);
  aq_[a] = aq;
  contrib_[a] = x2_[a] - 2.0 * aq * x1_[a] +
                aq * aq * static_cast<double>(x0_[a]);
}

void AdaptiveState::rebuild_numerics() {
  counts_.rebuild_caches();
  std::fill(x0_.begin(), x0_.end(), 0);
  std::fill(x1_.begin(), x1_.end(), 0.0);
  std::fill(x2_.begin(), x2_.end(), 0.0);
  for (std::size_t i = 0; i < z_.size(); ++i) {
    const Symbol a = z_[i];
    const double xi = x_->samples[i];
    x0_[a] += 1;
    x1_[a] += xi;
    x2_[a] += xi * xi;
  }
  occupied_ = 0;
  sum_contrib_ = 0.0;
  for (Symbol a = 0; a < m_; ++a) {
    if (x0_[a] > 0) ++occupied_;
    refresh_symbol(a);
    sum_contrib_ += contrib_[a];
  }
}

double AdaptiveState::hypo_contrib(Symbol a, int dc, double dx1,
                                   double dx2) const {
  const std::int64_t c =
      static_cast<std::int64_t>(x0_[a]) + static_cast<std::int64_t>(dc);
  if (c <= 0) return 0.0;
  const double s1 = x1_[a] + dx1;
  const double s2 = x2_[a] + dx2;
  const double mean = s1 / static_cast<double>(c);
  const double aq = quant_.quantize(mean);
  return s2 - 2.0 * aq * s1 + aq * aq * static_cast<double>(c);
}

double AdaptiveState::delta_adaptive_distortion(std::size_t i, Symbol b) const {
  if (i >= z_.size()) throw ParameterError("i: position out of range");
  if (b >= m_) throw ParameterError("b: symbol out of range");
  const Symbol a = z_[i];
  if (a == b) return 0.0;
  const double xi = x_->samples[i];
  const double after_a = hypo_contrib(a, -1, -xi, -xi * xi);
  const double after_b = hypo_contrib(b, +1, +xi, +xi * xi);
  return (after_a + after_b) - (contrib_[a] + contrib_[b]);
}

int AdaptiveState::delta_effective(std::size_t i, Symbol b) const {
  const Symbol a = z_[i];
  if (a == b) return 0;
  int d = 0;
  if (x0_[a] == 1) d -= 1;
  if (x0_[b] == 0) d += 1;
  return d;
}

double AdaptiveState::current_energy() const {
  return counts_.nh() - beta_ * sum_contrib_ +
         penalty_weight_ * static_cast<double>(occupied_);
}

void AdaptiveState::gibbs_conditional(std::size_t i, double s,
                                      std::span<double> out) const {
  counts_.delta_nh_all(z_, i, dnh_);
  const Symbol a = z_[i];
  const double xi = x_->samples[i];
  const double base_a = contrib_[a];
  const double after_a = hypo_contrib(a, -1, -xi, -xi * xi);

  double max_u = 0.0;
  for (Symbol b = 0; b < m_; ++b) {
    double u = 0.0;
    if (b != a) {
      const double dd =
          (after_a + hypo_contrib(b, +1, +xi, +xi * xi)) - (base_a + contrib_[b]);
      double pen = 0.0;
      if (penalty_) {
        int dz = 0;
        if (x0_[a] == 1) dz -= 1;
        if (x0_[b] == 0) dz += 1;
        pen = penalty_weight_ * static_cast<double>(dz);
      }
      u = -s * (dnh_[b] - beta_ * dd + pen);
    }
    out[b] = u;
    if (u > max_u) max_u = u;
  }
  double sum = 0.0;
  for (Symbol b = 0; b < m_; ++b) {
    out[b] = std::exp(out[b] - max_u);
    sum += out[b];
  }
  for (Symbol b = 0; b < m_; ++b) out[b] /= sum;
}

void AdaptiveState::resample(std::size_t i, double s, Pcg32& rng) {
  gibbs_conditional(i, s, pmf_);
  const double u = rng.next_double();
  double cum = 0.0;
  Symbol pick = m_ - 1;
  for (Symbol b = 0; b < m_; ++b) {
    cum += pmf_[b];
    if (u < cum) {
      pick = b;
      break;
    }
  }
  const Symbol a = z_[i];
  if (pick == a) return;

  const double xi = x_->samples[i];
  if (x0_[a] == 1) --occupied_;
  if (x0_[pick] == 0) ++occupied_;

  sum_contrib_ -= contrib_[a] + contrib_[pick];
  x0_[a] -= 1;
  x1_[a] -= xi;
  x2_[a] -= xi * xi;
  x0_[pick] += 1;
  x1_[pick] += xi;
  x2_[pick] += xi * xi;
  refresh_symbol(a);
  refresh_symbol(pick);
  sum_contrib_ += contrib_[a] + contrib_[pick];

  counts_.apply_substitution(z_, i, pick);
}

void AdaptiveState::super_iteration(double s, Pcg32& rng) {
  const std::size_t n = z_.size();
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::uint32_t j = rng.bounded(static_cast<std::uint32_t>(i + 1));
    std::swap(perm_[i], perm_[j]);
  }
  for (std::size_t t = 0; t < n; ++t) resample(perm_[t], s, rng);
  rebuild_numerics();
}

AdaptiveCodebook AdaptiveState::codebook() const {
  AdaptiveCodebook book;
  book.quantizer = quant_;
  for (Symbol a = 0; a < m_; ++a) {
    if (x0_[a] == 0) continue;
    const double mean = x1_[a] / static_cast<double>(x0_[a]);
    const std::int64_t idx = quant_.quantize_index(mean);
    book.effective.push_back(a);
    book.level_index.push_back(idx);
    book.levels.push_back(quant_.level_of_index(idx));
  }
  return book;
}

MomentTable AdaptiveState::moments() const {
  MomentTable t;
  t.x0 = x0_;
  t.x1 = x1_;
  t.x2 = x2_;
  return t;
}

double adaptive_energy(const SignalBuffer& x, std::span<const Symbol> z,
                       std::uint32_t m, const AdaptiveConfig& cfg) {
  cfg.validate(x.size());
  AdaptiveState state(x, std::vector<Symbol>(z.begin(), z.end()), m, cfg);
  return state.current_energy();
}

std::vector<Symbol> adaptive_initial_sequence(const SignalBuffer& x,
                                              std::uint32_t m) {
  if (m == default_alphabet_size(x.size())) {
    const ReproductionGrid grid = build_grid(x.size());
    return quantize_to_grid(x, grid);
  }
  const auto [lo, hi] =
      std::minmax_element(x.samples.begin(), x.samples.end());
  const std::vector<double> levels = uniform_levels(*lo, *hi, m);
  return quantize_to_levels(x.samples, levels);
}

AdaptiveResult run_algorithm2(const SignalBuffer& x, std::uint32_t m,
                              const AdaptiveConfig& cfg) {
  return run_algorithm2_from(x, adaptive_initial_sequence(x, m), m, cfg);
}

AdaptiveResult run_algorithm2_from(const SignalBuffer& x,
                                   std::vector<Symbol> z0, std::uint32_t m,
                                   const AdaptiveConfig& cfg) {
  cfg.validate(x.size());
  AdaptiveState state(x, std::move(z0), m, cfg);
  Pcg32 rng = substream(cfg.anneal.seed, 0xa2);
  for (std::uint32_t t = 1; t <= cfg.anneal.r; ++t)
    state.super_iteration(cfg.anneal.schedule(t), rng);
  AdaptiveResult result;
  result.z = state.z();
  result.codebook = state.codebook();
  result.final_energy = state.current_energy();
  return result;
}

}  // namespace mclc
