// mclc: generate test sources, encode/decode .mclc streams, run rate sweeps,
// and emit oracle curves and comparison reports.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mclc/baselines.hpp"
#include "mclc/bench.hpp"
#include "mclc/codec.hpp"
#include "mclc/common.hpp"
#include "mclc/sources.hpp"

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw mclc::ParseError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw mclc::ParseError("write failed: " + path);
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw mclc::ParseError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw mclc::ParseError("write failed: " + path);
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mclc::ParseError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

/// Every emitted file gets a sidecar with the resolved parameters, enough to
/// rerun the command.
void write_sidecar(const std::string& path, const std::string& command,
                   const json& params) {
  json meta;
  meta["tool"] = "mclc";
  meta["version"] = mclc::kVersionString;
  meta["command"] = command;
  meta["parameters"] = params;
  write_file(path + ".meta.json", meta.dump(2) + "\n");
}

void log_resolved(const std::string& command, const json& params) {
  json line;
  line["command"] = command;
  line["parameters"] = params;
  std::cerr << "mclc: " << line.dump() << "\n";
}

mclc::SignalFormat parse_format(const std::string& name) {
  if (name == "f64") return mclc::SignalFormat::kRawFloat64;
  if (name == "text") return mclc::SignalFormat::kTextLines;
  throw CLI::ValidationError("--format", "expected f64 or text");
}

struct SourceFlags {
  std::string kind = "gaussian";
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  double scale = 1.0;
  double mean = 0.0;
  double variance = 1.0;
  double rho = 0.9;
  double innovation_variance = 1.0;

  void attach(CLI::App* cmd, bool require_n = true) {
    cmd->add_option("--kind", kind, "Source kind: laplace | gaussian | ar1")
        ->check(CLI::IsMember({"laplace", "gaussian", "ar1"}));
    auto* n_opt = cmd->add_option("--n", n, "Sequence length");
    if (require_n) n_opt->required();
    cmd->add_option("--seed", seed, "PRNG seed");
    cmd->add_option("--scale", scale, "Laplace scale");
    cmd->add_option("--mean", mean, "Gaussian mean");
    cmd->add_option("--variance", variance, "Gaussian variance");
    cmd->add_option("--rho", rho, "AR(1) coefficient");
    cmd->add_option("--innovation-variance", innovation_variance,
                    "AR(1) innovation variance");
  }

  mclc::SourceSpec spec() const {
    if (kind == "laplace") return mclc::SourceSpec::laplace(scale, n, seed);
    if (kind == "ar1")
      return mclc::SourceSpec::ar1(rho, innovation_variance, n, seed);
    return mclc::SourceSpec::gaussian(mean, variance, n, seed);
  }

  json params() const {
    json p;
    p["kind"] = kind;
    p["n"] = n;
    p["seed"] = seed;
    if (kind == "laplace") p["scale"] = scale;
    if (kind == "gaussian") {
      p["mean"] = mean;
      p["variance"] = variance;
    }
    if (kind == "ar1") {
      p["rho"] = rho;
      p["innovation_variance"] = innovation_variance;
    }
    return p;
  }
};

std::uint32_t default_jobs() {
  if (const char* env = std::getenv("MCLC_JOBS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::uint32_t>(v);
  }
  return 1;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const SourceFlags& src, const std::string& out,
                 const std::string& format) {
  const mclc::SignalBuffer x = mclc::generate(src.spec());
  mclc::write_signal(out, x, parse_format(format));
  json params = src.params();
  params["out"] = out;
  params["format"] = format;
  log_resolved("generate", params);
  write_sidecar(out, "generate", params);
  std::cerr << "mclc: wrote " << x.size() << " samples (mean "
            << x.empirical_mean << ", variance " << x.empirical_variance
            << ") to " << out << "\n";
  return 0;
}

// ------------------------------------------------------------------ encode

struct EncodeFlags {
  std::string in;
  std::string in_format = "f64";
  std::string out;
  std::string algo = "adaptive";
  std::uint32_t alphabet = 0;
  double beta = -1.0;
  double c = 1.0;
  std::uint32_t r = 50;
  std::int64_t k = -1;
  std::uint64_t seed = 0;
  double mu = 4.0;
  bool alphabet_penalty = false;
  std::int64_t ctw_depth = -1;
};

int cmd_encode(const EncodeFlags& f) {
  const mclc::SignalBuffer x = mclc::ingest(f.in, parse_format(f.in_format));
  mclc::CodecConfig cfg;
  cfg.algorithm = (f.algo == "fixed") ? mclc::kAlgorithmFixed
                                      : mclc::kAlgorithmAdaptive;
  cfg.beta = f.beta;
  cfg.c = f.c;
  cfg.r = f.r;
  if (f.k >= 0) cfg.k = static_cast<std::uint32_t>(f.k);
  cfg.seed = f.seed;
  cfg.alphabet = f.alphabet;
  cfg.mu = f.mu;
  cfg.alphabet_penalty = f.alphabet_penalty;
  if (f.ctw_depth >= 0) cfg.ctw_depth = static_cast<std::uint32_t>(f.ctw_depth);

  const mclc::EncodeResult result = mclc::encode_stream(x, cfg);
  write_file(f.out, result.stream.serialize());

  json params;
  params["in"] = f.in;
  params["in_format"] = f.in_format;
  params["out"] = f.out;
  params["algo"] = f.algo;
  params["alphabet"] = result.stream.header.m;
  params["beta"] = f.beta;
  params["c"] = f.c;
  params["r"] = f.r;
  params["k"] = result.stream.header.k;
  params["seed"] = f.seed;
  params["mu"] = f.mu;
  params["alphabet_penalty"] = f.alphabet_penalty;
  params["ctw_depth"] = result.stream.header.ctw_depth;
  log_resolved("encode", params);
  write_sidecar(f.out, "encode", params);

  std::cerr << "mclc: n=" << x.size() << " net_rate=" << result.rd.rate
            << " bits/symbol gross_rate=" << result.gross_rate
            << " mse=" << result.rd.distortion << " snr=" << result.rd.snr_db
            << " dB effective=" << result.stream.header.effective << "\n";
  return 0;
}

// ------------------------------------------------------------------ decode

int cmd_decode(const std::string& in, const std::string& out,
               const std::string& format) {
  const std::vector<std::uint8_t> bytes = read_bytes(in);
  const std::vector<double> y = mclc::decode_stream_bytes(bytes);
  mclc::write_signal(out, mclc::SignalBuffer::from_samples(y),
                     parse_format(format));
  json params;
  params["in"] = in;
  params["out"] = out;
  params["format"] = format;
  log_resolved("decode", params);
  write_sidecar(out, "decode", params);
  std::cerr << "mclc: decoded " << y.size() << " samples to " << out << "\n";
  return 0;
}

// ------------------------------------------------------------------- sweep

mclc::RDCurve oracle_curve_for(const mclc::SourceSpec& spec,
                               const std::vector<double>& distortions) {
  mclc::RDCurve curve;
  curve.label = "rd-oracle";
  switch (spec.kind) {
    case mclc::SourceKind::kGaussian: {
      curve.provenance["method"] = "gaussian closed form";
      for (double d : distortions)
        if (d > 0 && d <= spec.variance)
          curve.points.push_back(mclc::make_rd_point(
              mclc::gaussian_rd(spec.variance, d), d, spec.variance));
      break;
    }
    case mclc::SourceKind::kLaplace: {
      curve.provenance["method"] = "blahut-arimoto, +-12 scale, 2001 points";
      const mclc::DiscreteSource src =
          mclc::discretize_laplace(spec.scale, 12.0 * spec.scale, 2001);
      const mclc::DiscreteSource repro =
          mclc::discretize_laplace(spec.scale, 12.0 * spec.scale, 801);
      const double var = 2.0 * spec.scale * spec.scale;
      for (double d : distortions) {
        if (!(d > 0) || d >= var) continue;
        const mclc::BaPoint p =
            mclc::blahut_arimoto(src, repro.points, d, 1e-4);
        curve.points.push_back(
            mclc::make_rd_point(p.rate, p.distortion, var));
      }
      break;
    }
    case mclc::SourceKind::kAr1: {
      curve.provenance["method"] = "reverse water-filling";
      const double var =
          spec.innovation_variance / (1.0 - spec.rho * spec.rho);
      for (double d : distortions)
        if (d > 0 && d <= var)
          curve.points.push_back(mclc::make_rd_point(
              mclc::ar1_gaussian_rd(spec.rho, spec.innovation_variance, d), d,
              var));
      break;
    }
  }
  curve.sort_points();
  return curve;
}

std::vector<double> ecsq_steps_spanning(const mclc::SignalBuffer& x) {
  // Steps giving a wide distortion span around the sweep's operating range.
  std::vector<double> steps;
  const double sd = std::sqrt(x.empirical_variance);
  for (double f = 0.05; f < 6.0; f *= 1.25) steps.push_back(f * sd);
  return steps;
}

int cmd_sweep(mclc::SweepPlan plan, const std::string& out_dir,
              const json& params) {
  std::filesystem::create_directories(out_dir);
  const mclc::SweepResult result = mclc::run_sweep(plan);

  const std::string results_path = out_dir + "/results.csv";
  write_file(results_path, mclc::sweep_csv(result));
  write_sidecar(results_path, "sweep", params);

  // Reference curves at the operating range of the sweep.
  const mclc::SignalBuffer x = mclc::generate(plan.source);
  const mclc::RDCurve ecsq = mclc::ecsq_curve(x, ecsq_steps_spanning(x));
  std::vector<double> distortions;
  for (const auto& agg : result.aggregates)
    distortions.push_back(agg.mean_rd.distortion);
  std::sort(distortions.begin(), distortions.end());
  const mclc::RDCurve oracle = oracle_curve_for(plan.source, distortions);

  write_file(out_dir + "/ecsq.csv", mclc::curve_csv(ecsq));
  write_sidecar(out_dir + "/ecsq.csv", "sweep", params);
  write_file(out_dir + "/oracle.csv", mclc::curve_csv(oracle));
  write_sidecar(out_dir + "/oracle.csv", "sweep", params);

  std::vector<mclc::RDCurve> curves;
  for (std::uint32_t m : plan.alphabet_sizes)
    curves.push_back(
        mclc::sweep_curve(result, m, "mcmc |Z|=" + std::to_string(m)));
  curves.push_back(ecsq);
  curves.push_back(oracle);

  const std::string svg_path =
      out_dir + "/rd_" + plan.source.kind_name() + ".svg";
  write_file(svg_path,
             mclc::svg_rd_plot(curves, "rate-distortion: " +
                                           plan.source.kind_name()));
  write_sidecar(svg_path, "sweep", params);

  const auto gaps = mclc::compare(result, {ecsq, oracle});
  write_file(out_dir + "/gaps.csv", mclc::gaps_csv(gaps));
  write_sidecar(out_dir + "/gaps.csv", "sweep", params);

  log_resolved("sweep", params);
  std::cerr << "mclc: sweep finished, " << result.points.size()
            << " points -> " << out_dir << "\n";
  return 0;
}

// --------------------------------------------------------------------- rd

int cmd_rd(const std::string& oracle, const SourceFlags& src,
           const std::vector<double>& distortions,
           const std::vector<double>& steps, const std::string& out) {
  mclc::RDCurve curve;
  if (oracle == "ecsq") {
    if (src.n == 0)
      throw CLI::ValidationError("--n", "ecsq needs a generated source");
    const mclc::SignalBuffer x = mclc::generate(src.spec());
    curve = mclc::ecsq_curve(
        x, steps.empty() ? ecsq_steps_spanning(x) : steps);
  } else {
    mclc::SourceSpec spec = src.spec();
    if (oracle == "gaussian") spec.kind = mclc::SourceKind::kGaussian;
    if (oracle == "laplace") spec.kind = mclc::SourceKind::kLaplace;
    if (oracle == "ar1") spec.kind = mclc::SourceKind::kAr1;
    if (distortions.empty())
      throw CLI::ValidationError("--distortions", "required for RD oracles");
    curve = oracle_curve_for(spec, distortions);
  }
  const std::string csv = mclc::curve_csv(curve);
  json params;
  params["oracle"] = oracle;
  params["source"] = src.params();
  params["distortions"] = distortions;
  params["steps"] = steps;
  if (out.empty()) {
    std::cout << csv;
  } else {
    params["out"] = out;
    write_file(out, csv);
    write_sidecar(out, "rd", params);
  }
  log_resolved("rd", params);
  return 0;
}

// ----------------------------------------------------------------- report

mclc::RDCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mclc::ParseError("cannot open " + path);
  mclc::RDCurve curve;
  std::string line;
  if (!std::getline(in, line))
    throw mclc::ParseError(path + ": empty curve file");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string label, rate, mse, snr;
    std::getline(ss, label, ',');
    std::getline(ss, rate, ',');
    std::getline(ss, mse, ',');
    std::getline(ss, snr, ',');
    curve.label = label;
    mclc::RDPoint p;
    p.rate = std::stod(rate);
    p.distortion = std::stod(mse);
    p.snr_db = std::stod(snr);
    curve.points.push_back(p);
  }
  curve.sort_points();
  return curve;
}

int cmd_report(const std::string& results_path,
               const std::vector<std::string>& curve_paths,
               const std::string& out) {
  std::ifstream in(results_path);
  if (!in) throw mclc::ParseError("cannot open " + results_path);
  std::string line;
  if (!std::getline(in, line))
    throw mclc::ParseError(results_path + ": empty results file");

  // Rebuild aggregates from the results table.
  struct Key {
    std::uint32_t m;
    double beta;
    bool operator<(const Key& o) const {
      if (m != o.m) return m < o.m;
      return std::fabs(beta) < std::fabs(o.beta);
    }
  };
  std::map<Key, std::vector<mclc::RDPoint>> groups;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> cols;
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() < 14)
      throw mclc::ParseError(results_path + ": malformed row: " + line);
    Key key{static_cast<std::uint32_t>(std::stoul(cols[3])), std::stod(cols[4])};
    mclc::RDPoint p;
    p.rate = std::stod(cols[8]);
    p.distortion = std::stod(cols[10]);
    p.snr_db = std::stod(cols[11]);
    groups[key].push_back(p);
  }

  mclc::SweepResult result;
  for (const auto& [key, pts] : groups) {
    mclc::SweepAggregate agg;
    agg.m = key.m;
    agg.beta = key.beta;
    for (const auto& p : pts) {
      agg.mean_rd.rate += p.rate;
      agg.mean_rd.distortion += p.distortion;
    }
    agg.mean_rd.rate /= static_cast<double>(pts.size());
    agg.mean_rd.distortion /= static_cast<double>(pts.size());
    result.aggregates.push_back(agg);
  }

  std::vector<mclc::RDCurve> curves;
  for (const auto& path : curve_paths) curves.push_back(read_curve_csv(path));

  const auto gaps = mclc::compare(result, curves);
  const std::string csv = mclc::gaps_csv(gaps);
  json params;
  params["results"] = results_path;
  params["curves"] = curve_paths;
  if (out.empty()) {
    std::cout << csv;
  } else {
    params["out"] = out;
    write_file(out, csv);
    write_sidecar(out, "report", params);
  }
  log_resolved("report", params);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MCMC rate-distortion codec for real-valued sequences"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file");

  // generate
  auto* gen = app.add_subcommand("generate", "Draw a synthetic source");
  SourceFlags gen_src;
  gen_src.attach(gen);
  std::string gen_out, gen_format = "f64";
  gen->add_option("--out", gen_out, "Output file")->required();
  gen->add_option("--format", gen_format, "f64 | text");

  // encode
  auto* enc = app.add_subcommand("encode", "Encode a real-valued sequence");
  EncodeFlags ef;
  enc->add_option("--in", ef.in, "Input signal file")->required();
  enc->add_option("--in-format", ef.in_format, "f64 | text");
  enc->add_option("--out", ef.out, "Output .mclc file")->required();
  enc->add_option("--algo", ef.algo, "fixed | adaptive")
      ->check(CLI::IsMember({"fixed", "adaptive"}));
  enc->add_option("--alphabet", ef.alphabet,
                  "|Z| for the adaptive coder (0 = 2 ceil(log2 n)^2 + 1)");
  enc->add_option("--beta", ef.beta, "RD slope (negative)");
  enc->add_option("--c", ef.c, "Annealing schedule constant");
  enc->add_option("--r", ef.r, "Super-iterations");
  enc->add_option("--k", ef.k, "Context depth (-1 = round(log_M(n)/2))");
  enc->add_option("--seed", ef.seed, "Annealer seed");
  enc->add_option("--mu", ef.mu, "Level description constant");
  enc->add_flag("--alphabet-penalty", ef.alphabet_penalty,
                "Charge mu*log2(log2 n)*|Z_e| inside the energy");
  enc->add_option("--ctw-depth", ef.ctw_depth, "CTW depth (-1 = k)");

  // decode
  auto* dec = app.add_subcommand("decode", "Decode a .mclc stream");
  std::string dec_in, dec_out, dec_format = "f64";
  dec->add_option("--in", dec_in, "Input .mclc file")->required();
  dec->add_option("--out", dec_out, "Output signal file")->required();
  dec->add_option("--format", dec_format, "f64 | text");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Run a rate sweep");
  std::string swp_preset, swp_dir = "sweep_out";
  SourceFlags swp_src;
  swp_src.attach(swp, false);
  std::vector<double> swp_betas, swp_c;
  std::vector<std::uint64_t> swp_seeds;
  std::vector<std::uint32_t> swp_alphabets;
  std::uint32_t swp_r = 50;
  std::int64_t swp_k = -1;
  double swp_mu = 4.0;
  bool swp_penalty = false, swp_no_timing = false;
  std::uint32_t swp_jobs = default_jobs();
  swp->add_option("--preset", swp_preset, "fig1 | fig2");
  swp->add_option("--out-dir", swp_dir, "Output directory");
  swp->add_option("--betas", swp_betas, "Slopes, ascending |beta|")
      ->delimiter(',');
  swp->add_option("--alphabets", swp_alphabets, "|Z| values")->delimiter(',');
  swp->add_option("--seeds", swp_seeds, "Seeds (one trial each)")
      ->delimiter(',');
  swp->add_option("--c-ladder", swp_c, "Schedule constants")->delimiter(',');
  swp->add_option("--r", swp_r, "Super-iterations");
  swp->add_option("--k", swp_k, "Context depth override");
  swp->add_option("--mu", swp_mu, "Level description constant");
  swp->add_flag("--alphabet-penalty", swp_penalty, "Penalty-in-energy mode");
  swp->add_flag("--no-timing", swp_no_timing,
                "Write wall_s as 0 so output files are byte-reproducible");
  swp->add_option("--jobs", swp_jobs, "Worker threads (env MCLC_JOBS)");

  // rd
  auto* rd = app.add_subcommand("rd", "Emit a reference RD curve");
  std::string rd_oracle, rd_out;
  SourceFlags rd_src;
  rd_src.attach(rd, false);
  std::vector<double> rd_distortions, rd_steps;
  rd->add_option("--oracle", rd_oracle, "gaussian | laplace | ar1 | ecsq")
      ->required()
      ->check(CLI::IsMember({"gaussian", "laplace", "ar1", "ecsq"}));
  rd->add_option("--distortions", rd_distortions, "Distortion targets")
      ->delimiter(',');
  rd->add_option("--steps", rd_steps, "ECSQ quantizer steps")->delimiter(',');
  rd->add_option("--out", rd_out, "Output CSV (default stdout)");

  // report
  auto* rep = app.add_subcommand("report", "Rate gaps vs reference curves");
  std::string rep_results, rep_out;
  std::vector<std::string> rep_curves;
  rep->add_option("--results", rep_results, "results.csv from sweep")
      ->required();
  rep->add_option("--curves", rep_curves, "Reference curve CSVs")
      ->delimiter(',')
      ->required();
  rep->add_option("--out", rep_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);

    if (gen->parsed()) return cmd_generate(gen_src, gen_out, gen_format);
    if (enc->parsed()) return cmd_encode(ef);
    if (dec->parsed()) return cmd_decode(dec_in, dec_out, dec_format);
    if (swp->parsed()) {
      mclc::SweepPlan plan;
      if (!swp_preset.empty()) {
        plan = mclc::preset_by_name(swp_preset);
      } else {
        if (swp_src.n == 0)
          throw CLI::ValidationError("--n", "required without --preset");
        plan.source = swp_src.spec();
        if (swp_betas.empty())
          throw CLI::ValidationError("--betas", "required without --preset");
        plan.betas = swp_betas;
        if (!swp_alphabets.empty()) plan.alphabet_sizes = swp_alphabets;
        if (!swp_seeds.empty()) plan.seeds = swp_seeds;
      }
      if (swp->count("--betas") && !swp_preset.empty()) plan.betas = swp_betas;
      if (swp->count("--alphabets") && !swp_preset.empty())
        plan.alphabet_sizes = swp_alphabets;
      if (swp->count("--seeds") && !swp_preset.empty()) plan.seeds = swp_seeds;
      if (swp->count("--r")) plan.r = swp_r;
      if (swp_k >= 0) plan.k_override = static_cast<std::uint32_t>(swp_k);
      if (!swp_c.empty()) plan.c_candidates = swp_c;
      plan.mu = swp_mu;
      plan.alphabet_penalty = swp_penalty;
      plan.record_timing = !swp_no_timing;
      plan.jobs = swp_jobs;

      json params;
      params["preset"] = swp_preset;
      params["source"] = json{{"kind", plan.source.kind_name()},
                              {"n", plan.source.n},
                              {"seed", plan.source.seed}};
      params["betas"] = plan.betas;
      params["alphabets"] = plan.alphabet_sizes;
      params["seeds"] = plan.seeds;
      params["r"] = plan.r;
      params["c_ladder"] = plan.c_candidates;
      params["mu"] = plan.mu;
      params["alphabet_penalty"] = plan.alphabet_penalty;
      params["no_timing"] = swp_no_timing;
      params["out_dir"] = swp_dir;
      return cmd_sweep(plan, swp_dir, params);
    }
    if (rd->parsed())
      return cmd_rd(rd_oracle, rd_src, rd_distortions, rd_steps, rd_out);
    if (rep->parsed()) return cmd_report(rep_results, rep_curves, rep_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const mclc::ParameterError& e) {
    std::cerr << "mclc: usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "mclc: error: " << e.what() << "\n";
    return 2;
  }
}
