#include "mclc/sources.hpp"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>

#include "mclc/random.hpp"

namespace mclc {

SourceSpec SourceSpec::laplace(double scale, std::uint64_t n, std::uint64_t seed) {
  SourceSpec s;
  s.kind = SourceKind::kLaplace;
  s.scale = scale;
  s.n = n;
  s.seed = seed;
  return s;
}

SourceSpec SourceSpec::gaussian(double mean, double variance, std::uint64_t n,
                                std::uint64_t seed) {
  SourceSpec s;
  s.kind = SourceKind::kGaussian;
  s.mean = mean;
  s.variance = variance;
  s.n = n;
  s.seed = seed;
  return s;
}

SourceSpec SourceSpec::ar1(double rho, double innovation_variance, std::uint64_t n,
                           std::uint64_t seed) {
  SourceSpec s;
  s.kind = SourceKind::kAr1;
  s.rho = rho;
  s.innovation_variance = innovation_variance;
  s.n = n;
  s.seed = seed;
  return s;
}

void SourceSpec::validate() const {
  if (n < 1) throw ParameterError("n: length must be >= 1");
  switch (kind) {
    case SourceKind::kLaplace:
      if (!(scale > 0.0) || !std::isfinite(scale))
        throw ParameterError("scale: must be a positive real");
      break;
    case SourceKind::kGaussian:
      if (!std::isfinite(mean)) throw ParameterError("mean: must be finite");
      if (!(variance > 0.0) || !std::isfinite(variance))
        throw ParameterError("variance: must be a positive real");
      break;
    case SourceKind::kAr1:
      if (!(std::fabs(rho) < 1.0))
        throw ParameterError("rho: must satisfy |rho| < 1 (stationarity)");
      if (!(innovation_variance > 0.0) || !std::isfinite(innovation_variance))
        throw ParameterError("innovation_variance: must be a positive real");
      break;
  }
}

std::string SourceSpec::kind_name() const {
  switch (kind) {
    case SourceKind::kLaplace: return "laplace";
    case SourceKind::kGaussian: return "gaussian";
    case SourceKind::kAr1: return "ar1";
  }
  return "?";
}

SignalBuffer SignalBuffer::from_samples(std::vector<double> samples) {
  SignalBuffer buf;
  buf.samples = std::move(samples);
  const std::size_t n = buf.samples.size();
  if (n == 0) return buf;
  double sum = 0.0;
  for (double v : buf.samples) sum += v;
  buf.empirical_mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : buf.samples) {
    const double d = v - buf.empirical_mean;
    ss += d * d;
  }
  buf.empirical_variance = ss / static_cast<double>(n);
  return buf;
}

namespace {

// Inverse CDF of the unit Laplace law from a single uniform draw.
double laplace_quantile(double u, double scale) {
  const double t = u - 0.5;
  const double mag = -std::log(1.0 - 2.0 * std::fabs(t));
  return (t < 0.0 ? -scale : scale) * mag;
}

double gaussian_draw(Pcg32& rng) {
  // next_double() is in [0,1); shift to (0,1) for the quantile.
  double u;
  do {
    u = rng.next_double();
  } while (u == 0.0);
  return inverse_normal_cdf(u);
}

}  // namespace

SignalBuffer generate(const SourceSpec& spec) {
  spec.validate();
  Pcg32 rng = substream(spec.seed, 0x6d636c63u /* "mclc" */,
                        static_cast<std::uint64_t>(spec.kind), spec.n);
  std::vector<double> samples;
  samples.reserve(spec.n);
  switch (spec.kind) {
    case SourceKind::kLaplace: {
      for (std::uint64_t i = 0; i < spec.n; ++i) {
        double u;
        do {
          u = rng.next_double();
        } while (u == 0.5 || 1.0 - 2.0 * std::fabs(u - 0.5) <= 0.0);
        samples.push_back(laplace_quantile(u, spec.scale));
      }
      break;
    }
    case SourceKind::kGaussian: {
      const double sd = std::sqrt(spec.variance);
      for (std::uint64_t i = 0; i < spec.n; ++i)
        samples.push_back(spec.mean + sd * gaussian_draw(rng));
      break;
    }
    case SourceKind::kAr1: {
      const double innov_sd = std::sqrt(spec.innovation_variance);
      // Start from the stationary marginal so the whole path is stationary.
      const double marginal_sd =
          std::sqrt(spec.innovation_variance / (1.0 - spec.rho * spec.rho));
      double x = marginal_sd * gaussian_draw(rng);
      samples.push_back(x);
      for (std::uint64_t i = 1; i < spec.n; ++i) {
        x = spec.rho * x + innov_sd * gaussian_draw(rng);
        samples.push_back(x);
      }
      break;
    }
  }
  return SignalBuffer::from_samples(std::move(samples));
}

SignalBuffer ingest(const std::filesystem::path& path, SignalFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  if (format == SignalFormat::kRawFloat64) {
    in.seekg(0, std::ios::end);
    const std::streamoff bytes = in.tellg();
    in.seekg(0);
    if (bytes <= 0) throw ParseError(path.string() + ": empty file");
    if (bytes % 8 != 0)
      throw ParseError(path.string() + ": size " + std::to_string(bytes) +
                       " is not a multiple of 8 bytes");
    std::vector<double> samples(static_cast<std::size_t>(bytes / 8));
    in.read(reinterpret_cast<char*>(samples.data()), bytes);
    if (!in) throw ParseError(path.string() + ": short read");
    // Stored little-endian; this code targets little-endian hosts.
    static_assert(std::endian::native == std::endian::little,
                  "raw-float64 I/O assumes a little-endian host");
    return SignalBuffer::from_samples(std::move(samples));
  }
  std::vector<double> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* begin = line.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0') || errno != 0)
      throw ParseError(path.string() + ": parse error at line " +
                       std::to_string(lineno) + ": '" + line + "'");
    samples.push_back(v);
  }
  if (samples.empty()) throw ParseError(path.string() + ": empty file");
  return SignalBuffer::from_samples(std::move(samples));
}

void write_signal(const std::filesystem::path& path, const SignalBuffer& x,
                  SignalFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  if (format == SignalFormat::kRawFloat64) {
    out.write(reinterpret_cast<const char*>(x.samples.data()),
              static_cast<std::streamsize>(x.samples.size() * 8));
  } else {
    char buf[48];
    for (double v : x.samples) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", v);
      out << buf;
    }
  }
  if (!out) throw ParseError("write failed: " + path.string());
}

}  // namespace mclc
