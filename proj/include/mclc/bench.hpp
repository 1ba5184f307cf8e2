#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mclc/baselines.hpp"
#include "mclc/codec.hpp"
#include "mclc/sources.hpp"

namespace mclc {

/// A rate sweep: for each alphabet size and seed, chase the betas in order of
/// increasing |beta|, warm-starting each from the previous solution, running
/// the schedule-constant ladder at every point and keeping the best-energy
/// state.
struct SweepPlan {
  SourceSpec source;
  std::vector<double> betas;                    // ascending |beta|
  std::vector<std::uint32_t> alphabet_sizes{9};
  std::uint32_t r = 50;
  std::optional<std::uint32_t> k_override;      // default round(log_M(n)/2)
  std::vector<double> c_candidates{0.5, 1.0, 2.0, 4.0};
  std::vector<std::uint64_t> seeds{1};
  double mu = 4.0;
  bool alphabet_penalty = false;
  std::uint32_t jobs = 1;
  bool record_timing = true;  // off: wall_s column written as 0 (reproducible files)

  void validate() const;
};

struct SweepPointResult {
  std::uint32_t m = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t k = 0;
  double c_best = 0.0;  // 0 when the warm start was never improved
  RDPoint rd;           // audited against the emitted stream
  double gross_rate = 0.0;
  double energy = 0.0;
  double warm_start_energy = 0.0;  // energy of the chained-in state at this beta
  double wall_s = 0.0;
};

struct SweepAggregate {
  std::uint32_t m = 0;
  double beta = 0.0;
  RDPoint mean_rd;
  double mean_gross = 0.0;
  double mean_energy = 0.0;
};

struct SweepResult {
  SweepPlan plan;
  std::vector<SweepPointResult> points;      // ordered by (m, beta, seed)
  std::vector<SweepAggregate> aggregates;    // ordered by (m, beta)
};

SweepResult run_sweep(const SweepPlan& plan);

/// Rate gap of each aggregate sweep point against a reference curve,
/// interpolated at the point's achieved distortion. Points outside a curve's
/// distortion span are marked unavailable rather than extrapolated.
struct GapRow {
  std::uint32_t m = 0;
  double beta = 0.0;
  double distortion = 0.0;
  double rate = 0.0;
  std::string curve;
  double curve_rate = 0.0;
  double gap_bits = 0.0;
  double gap_db = 0.0;  // gap_bits * 6.0206 (the 6.02 dB-per-bit rule)
  bool available = false;
};

std::vector<GapRow> compare(const SweepResult& result,
                            const std::vector<RDCurve>& curves);

/// Linear interpolation of a curve's rate at a distortion; nullopt outside
/// the curve's span.
std::optional<double> interpolate_rate(const RDCurve& curve, double distortion);

std::string sweep_csv(const SweepResult& result);
std::string curve_csv(const RDCurve& curve);
std::string gaps_csv(const std::vector<GapRow>& rows);

/// Standalone SVG rate-distortion chart (rate vs distortion, one polyline
/// with markers per curve).
std::string svg_rd_plot(const std::vector<RDCurve>& curves,
                        const std::string& title);

RDCurve sweep_curve(const SweepResult& result, std::uint32_t m,
                    const std::string& label);

/// The paper-regime sweep plans.
SweepPlan preset_fig1();
SweepPlan preset_fig2();
SweepPlan preset_by_name(const std::string& name);

}  // namespace mclc
