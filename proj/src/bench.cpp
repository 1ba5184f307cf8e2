#include "mclc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

namespace mclc {

void SweepPlan::validate() const {
  source.validate();
  if (betas.empty()) throw ParameterError("betas: need at least one slope");
  for (double b : betas)
    if (!(b < 0.0)) throw ParameterError("betas: slopes must be negative");
  for (std::size_t j = 1; j < betas.size(); ++j)
    if (!(std::fabs(betas[j]) > std::fabs(betas[j - 1])))
      throw ParameterError("betas: must be strictly ascending in |beta|");
  if (alphabet_sizes.empty()) throw ParameterError("alphabets: need at least one");
  for (std::uint32_t m : alphabet_sizes)
    if (m < 2) throw ParameterError("alphabets: |Z| must be >= 2");
  if (c_candidates.empty()) throw ParameterError("c: need at least one candidate");
  for (double c : c_candidates)
    if (!(c > 0.0)) throw ParameterError("c: candidates must be positive");
  if (seeds.empty()) throw ParameterError("seeds: need at least one seed");
  if (r < 1) throw ParameterError("r: need at least one super-iteration");
}

namespace {

struct ChainTask {
  std::uint32_t m = 0;
  std::uint64_t seed = 0;
};

// One (alphabet, seed) chain: all betas in order with warm starts.
std::vector<SweepPointResult> run_chain(const SignalBuffer& x,
                                        const SweepPlan& plan,
                                        const ChainTask& task) {
  const std::uint32_t m = task.m;
  const std::uint32_t k =
      plan.k_override ? *plan.k_override : default_context_depth(x.size(), m);

  std::vector<SweepPointResult> out;
  std::vector<Symbol> z = adaptive_initial_sequence(x, m);

  for (std::size_t bi = 0; bi < plan.betas.size(); ++bi) {
    const double beta = plan.betas[bi];
    const auto tick = std::chrono::steady_clock::now();

    AdaptiveConfig cfg;
    cfg.anneal.beta = beta;
    cfg.anneal.r = plan.r;
    cfg.anneal.k = k;
    cfg.mu = plan.mu;
    cfg.alphabet_penalty = plan.alphabet_penalty;

    // The warm start itself is the first candidate.
    cfg.anneal.c = plan.c_candidates.front();
    const double warm_energy = adaptive_energy(x, z, m, cfg);
    double best_energy = warm_energy;
    std::vector<Symbol> best_z = z;
    double c_best = 0.0;

    for (std::size_t ci = 0; ci < plan.c_candidates.size(); ++ci) {
      cfg.anneal.c = plan.c_candidates[ci];
      cfg.anneal.seed =
          task.seed ^ (0x517cc1b727220a95ULL * (bi + 1)) ^ (ci << 32);
      AdaptiveResult run = run_algorithm2_from(x, best_z, m, cfg);
      if (run.final_energy < best_energy) {
        best_energy = run.final_energy;
        best_z = std::move(run.z);
        c_best = plan.c_candidates[ci];
      }
    }

    AdaptiveConfig book_cfg = cfg;
    book_cfg.anneal.r = 1;
    AdaptiveState final_state(x, best_z, m, book_cfg);
    EncodeResult packed =
        pack_adaptive(x, best_z, final_state.codebook(), m, k, k);

    // Audit the reported point against the emitted artifact.
    const std::vector<std::uint8_t> bytes = packed.stream.serialize();
    const EncodedStream reparsed = EncodedStream::parse(bytes);
    const std::vector<double> y = decode_stream(reparsed);
    const double audited_mse = distortion(x.samples, y);
    const double audited_net =
        (static_cast<double>(reparsed.header.payload_bits) +
         static_cast<double>(reparsed.level_description_bits())) /
        static_cast<double>(x.size());

    SweepPointResult point;
    point.m = m;
    point.beta = beta;
    point.seed = task.seed;
    point.k = k;
    point.c_best = c_best;
    point.rd = make_rd_point(audited_net, audited_mse, x.empirical_variance);
    point.gross_rate =
        static_cast<double>(8 * bytes.size()) / static_cast<double>(x.size());
    point.energy = best_energy;
    point.warm_start_energy = warm_energy;
    if (plan.record_timing) {
      point.wall_s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - tick)
                         .count();
    }
    out.push_back(point);

    z = std::move(best_z);  // warm start for the next beta
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepPlan& plan) {
  plan.validate();
  const SignalBuffer x = generate(plan.source);

  std::vector<ChainTask> tasks;
  for (std::uint32_t m : plan.alphabet_sizes)
    for (std::uint64_t seed : plan.seeds) tasks.push_back({m, seed});

  std::vector<std::vector<SweepPointResult>> chunks(tasks.size());
  const std::uint32_t jobs = std::max<std::uint32_t>(1, plan.jobs);
  if (jobs == 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t)
      chunks[t] = run_chain(x, plan, tasks[t]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t t = next.fetch_add(1);
        if (t >= tasks.size()) return;
        chunks[t] = run_chain(x, plan, tasks[t]);
      }
    };
    std::vector<std::thread> pool;
    const std::uint32_t width =
        std::min<std::uint32_t>(jobs, static_cast<std::uint32_t>(tasks.size()));
    pool.reserve(width);
    for (std::uint32_t w = 0; w < width; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  result.plan = plan;
  for (const auto& chunk : chunks)
    result.points.insert(result.points.end(), chunk.begin(), chunk.end());
  std::stable_sort(result.points.begin(), result.points.end(),
                   [](const SweepPointResult& a, const SweepPointResult& b) {
                     if (a.m != b.m) return a.m < b.m;
                     if (std::fabs(a.beta) != std::fabs(b.beta))
                       return std::fabs(a.beta) < std::fabs(b.beta);
                     return a.seed < b.seed;
                   });

  for (std::uint32_t m : plan.alphabet_sizes) {
    for (double beta : plan.betas) {
      SweepAggregate agg;
      agg.m = m;
      agg.beta = beta;
      std::size_t count = 0;
      for (const auto& p : result.points) {
        if (p.m != m || p.beta != beta) continue;
        agg.mean_rd.rate += p.rd.rate;
        agg.mean_rd.distortion += p.rd.distortion;
        agg.mean_gross += p.gross_rate;
        agg.mean_energy += p.energy;
        ++count;
      }
      if (count == 0) continue;
      const double inv = 1.0 / static_cast<double>(count);
      agg.mean_rd.rate *= inv;
      agg.mean_rd.distortion *= inv;
      agg.mean_gross *= inv;
      agg.mean_energy *= inv;
      agg.mean_rd = make_rd_point(agg.mean_rd.rate, agg.mean_rd.distortion,
                                  x.empirical_variance);
      result.aggregates.push_back(agg);
    }
  }
  return result;
}

std::optional<double> interpolate_rate(const RDCurve& curve, double distortion) {
  const auto& pts = curve.points;
  if (pts.size() < 2) return std::nullopt;
  if (distortion < pts.front().distortion || distortion > pts.back().distortion)
    return std::nullopt;
  for (std::size_t j = 1; j < pts.size(); ++j) {
    if (distortion <= pts[j].distortion) {
      const double d0 = pts[j - 1].distortion;
      const double d1 = pts[j].distortion;
      const double r0 = pts[j - 1].rate;
      const double r1 = pts[j].rate;
      if (d1 == d0) return 0.5 * (r0 + r1);
      const double w = (distortion - d0) / (d1 - d0);
      return r0 + w * (r1 - r0);
    }
  }
  return pts.back().rate;
}

std::vector<GapRow> compare(const SweepResult& result,
                            const std::vector<RDCurve>& curves) {
  std::vector<GapRow> rows;
  for (const auto& agg : result.aggregates) {
    for (const auto& curve : curves) {
      GapRow row;
      row.m = agg.m;
      row.beta = agg.beta;
      row.distortion = agg.mean_rd.distortion;
      row.rate = agg.mean_rd.rate;
      row.curve = curve.label;
      const auto ref = interpolate_rate(curve, row.distortion);
      if (ref) {
        row.available = true;
        row.curve_rate = *ref;
        row.gap_bits = row.rate - *ref;
        row.gap_db = row.gap_bits * 6.020599913279624;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string sweep_csv(const SweepResult& result) {
  std::string out =
      "source,n,k,M,beta,c_best,r,seed,net_rate_bps,gross_rate_bps,mse,snr_db,"
      "energy,wall_s\n";
  for (const auto& p : result.points) {
    out += result.plan.source.kind_name();
    out += ',' + std::to_string(result.plan.source.n);
    out += ',' + std::to_string(p.k);
    out += ',' + std::to_string(p.m);
    out += ',' + fmt(p.beta);
    out += ',' + fmt(p.c_best);
    out += ',' + std::to_string(result.plan.r);
    out += ',' + std::to_string(p.seed);
    out += ',' + fmt(p.rd.rate);
    out += ',' + fmt(p.gross_rate);
    out += ',' + fmt(p.rd.distortion);
    out += ',' + fmt(p.rd.snr_db);
    out += ',' + fmt(p.energy);
    out += ',' + fmt(p.wall_s);
    out += '\n';
  }
  return out;
}

std::string curve_csv(const RDCurve& curve) {
  std::string out = "label,rate_bps,mse,snr_db\n";
  for (const auto& p : curve.points) {
    out += curve.label;
    out += ',' + fmt(p.rate);
    out += ',' + fmt(p.distortion);
    out += ',' + fmt(p.snr_db);
    out += '\n';
  }
  return out;
}

std::string gaps_csv(const std::vector<GapRow>& rows) {
  std::string out = "M,beta,mse,rate_bps,curve,curve_rate_bps,gap_bits,gap_db,available\n";
  for (const auto& r : rows) {
    out += std::to_string(r.m);
    out += ',' + fmt(r.beta);
    out += ',' + fmt(r.distortion);
    out += ',' + fmt(r.rate);
    out += ',' + r.curve;
    if (r.available) {
      out += ',' + fmt(r.curve_rate);
      out += ',' + fmt(r.gap_bits);
      out += ',' + fmt(r.gap_db);
      out += ",1\n";
    } else {
      out += ",,,,0\n";
    }
  }
  return out;
}

RDCurve sweep_curve(const SweepResult& result, std::uint32_t m,
                    const std::string& label) {
  RDCurve curve;
  curve.label = label;
  curve.provenance["method"] = "mcmc adaptive annealer, mean over seeds";
  for (const auto& agg : result.aggregates)
    if (agg.m == m) curve.points.push_back(agg.mean_rd);
  curve.sort_points();
  return curve;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string svg_rd_plot(const std::vector<RDCurve>& curves,
                        const std::string& title) {
  const double width = 720, height = 520;
  const double ml = 70, mr = 20, mt = 40, mb = 55;
  double dmin = 1e300, dmax = -1e300, rmin = 0.0, rmax = -1e300;
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      dmin = std::min(dmin, p.distortion);
      dmax = std::max(dmax, p.distortion);
      rmax = std::max(rmax, p.rate);
    }
  if (dmax <= dmin) {
    dmax = dmin + 1.0;
  }
  if (rmax <= 0.0) rmax = 1.0;
  dmin = 0.0;
  rmax *= 1.05;

  const auto xpix = [&](double d) {
    return ml + (d - dmin) / (dmax - dmin) * (width - ml - mr);
  };
  const auto ypix = [&](double r) {
    return height - mb - (r - rmin) / (rmax - rmin) * (height - mt - mb);
  };

  std::string svg;
  char buf[256];
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"520\" "
         "viewBox=\"0 0 720 520\">\n";
  svg += "<rect width=\"720\" height=\"520\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"24\" font-family=\"sans-serif\" "
                "font-size=\"16\" text-anchor=\"middle\">%s</text>\n",
                0.5 * width, title.c_str());
  svg += buf;

  // axes
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                "stroke=\"black\"/>\n",
                ml, height - mb, width - mr, height - mb);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                "stroke=\"black\"/>\n",
                ml, mt, ml, height - mb);
  svg += buf;
  for (int tx = 0; tx <= 5; ++tx) {
    const double d = dmin + (dmax - dmin) * tx / 5.0;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  xpix(d), height - mb, xpix(d), height - mb + 5);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"11\" text-anchor=\"middle\">%.3g</text>\n",
                  xpix(d), height - mb + 18, d);
    svg += buf;
  }
  for (int ty = 0; ty <= 5; ++ty) {
    const double r = rmin + (rmax - rmin) * ty / 5.0;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  ml - 5, ypix(r), ml, ypix(r));
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"11\" text-anchor=\"end\">%.3g</text>\n",
                  ml - 8, ypix(r) + 4, r);
    svg += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                "font-size=\"13\" text-anchor=\"middle\">distortion (MSE)</text>\n",
                0.5 * width, height - 12);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"18\" y=\"%.1f\" font-family=\"sans-serif\" "
                "font-size=\"13\" text-anchor=\"middle\" "
                "transform=\"rotate(-90 18 %.1f)\">rate (bits/symbol)</text>\n",
                0.5 * height, 0.5 * height);
  svg += buf;

  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const char* color = kPalette[ci % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string poly;
    for (const auto& p : curves[ci].points) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", xpix(p.distortion),
                    ypix(p.rate));
      poly += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
                  "stroke-width=\"1.5\"/>\n",
                  poly.c_str(), color);
    svg += buf;
    for (const auto& p : curves[ci].points) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                    xpix(p.distortion), ypix(p.rate), color);
      svg += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"12\" fill=\"%s\">%s</text>\n",
                  width - mr - 160.0, mt + 18.0 * (ci + 1), color,
                  curves[ci].label.c_str());
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

SweepPlan preset_fig1() {
  SweepPlan plan;
  plan.source = SourceSpec::laplace(1.0, 15000, 20260501);
  plan.alphabet_sizes = {9};
  plan.betas = {-0.5, -0.75, -1.1, -1.6, -2.4, -3.5, -5.2, -7.7};
  plan.r = 50;
  plan.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return plan;
}

SweepPlan preset_fig2() {
  SweepPlan plan;
  plan.source = SourceSpec::ar1(0.9, 1.0, 15000, 20260502);
  plan.alphabet_sizes = {3, 9};
  plan.betas = {-0.18, -0.28, -0.45, -0.7, -1.1, -1.8, -2.8, -4.5};
  plan.r = 50;
  plan.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return plan;
}

SweepPlan preset_by_name(const std::string& name) {
  if (name == "fig1") return preset_fig1();
  if (name == "fig2") return preset_fig2();
  throw ParameterError("unknown preset '" + name + "' (expected fig1 or fig2)");
}

}  // namespace mclc
