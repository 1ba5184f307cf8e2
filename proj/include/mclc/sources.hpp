#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mclc/common.hpp"

namespace mclc {

enum class SourceKind { kLaplace, kGaussian, kAr1 };

/// Parameters of a synthetic stationary ergodic test source.
struct SourceSpec {
  SourceKind kind = SourceKind::kGaussian;
  double scale = 1.0;                 // laplace
  double mean = 0.0;                  // gaussian
  double variance = 1.0;              // gaussian
  double rho = 0.0;                   // ar1, |rho| < 1
  double innovation_variance = 1.0;   // ar1
  std::uint64_t n = 0;
  std::uint64_t seed = 0;

  static SourceSpec laplace(double scale, std::uint64_t n, std::uint64_t seed);
  static SourceSpec gaussian(double mean, double variance, std::uint64_t n,
                             std::uint64_t seed);
  static SourceSpec ar1(double rho, double innovation_variance, std::uint64_t n,
                        std::uint64_t seed);

  /// Throws ParameterError naming the offending field.
  void validate() const;

  std::string kind_name() const;
};

/// A real-valued input sequence plus its summary statistics.
struct SignalBuffer {
  std::vector<double> samples;
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;  // per-symbol second central moment

  static SignalBuffer from_samples(std::vector<double> samples);
  std::size_t size() const { return samples.size(); }
};

/// Draws x^n from the spec's law. Deterministic given (spec, seed).
SignalBuffer generate(const SourceSpec& spec);

enum class SignalFormat { kRawFloat64, kTextLines };

/// Reads a sequence from disk; n is inferred from the content.
SignalBuffer ingest(const std::filesystem::path& path, SignalFormat format);

void write_signal(const std::filesystem::path& path, const SignalBuffer& x,
                  SignalFormat format);

}  // namespace mclc
