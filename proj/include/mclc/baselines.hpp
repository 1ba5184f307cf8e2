#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mclc/codec.hpp"
#include "mclc/sources.hpp"

namespace mclc {

/// Iterative method failed to reach its tolerance; message carries the
/// residual.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RDCurve {
  std::string label;
  std::vector<RDPoint> points;  // sorted by distortion ascending
  std::map<std::string, std::string> provenance;

  void sort_points();
};

/// Entropy-coded scalar quantization reference: a uniform mid-rise quantizer
/// (reproduction (m + 1/2) q) followed by an ideal order-0 entropy coder.
RDCurve ecsq_curve(const SignalBuffer& x, std::span<const double> steps);

/// Closed-form Gaussian RD: (1/2) log2(variance / D) for 0 < D <= variance.
double gaussian_rd(double variance, double d);

/// A pdf discretized onto a point grid for Blahut-Arimoto.
struct DiscreteSource {
  std::vector<double> points;
  std::vector<double> pmf;
};

DiscreteSource discretize_gaussian(double variance, double halfwidth,
                                   std::size_t npoints);
DiscreteSource discretize_laplace(double scale, double halfwidth,
                                  std::size_t npoints);

struct BaPoint {
  double rate = 0.0;        // bits per symbol
  double distortion = 0.0;  // mean squared error
  double beta = 0.0;        // slope of the supporting line, bits per unit D
  std::uint32_t iterations = 0;
  double gap_bits = 0.0;    // duality gap at the stopping point
};

/// Alternating minimization at fixed slope beta (< 0, bits domain). Stops
/// when the duality gap drops below tol bits; throws ConvergenceError with
/// the residual gap if max_iterations is hit first.
BaPoint blahut_arimoto_slope(const DiscreteSource& source,
                             std::span<const double> reproduction, double beta,
                             double tol, std::uint32_t max_iterations = 200000);

/// Blahut-Arimoto point hitting a target distortion (bisects the slope).
BaPoint blahut_arimoto(const DiscreteSource& source,
                       std::span<const double> reproduction, double target_d,
                       double tol, std::uint32_t max_iterations = 200000);

/// RD function of the stationary Gaussian AR(1) process by reverse
/// water-filling over its spectral density. D in (0, process variance].
double ar1_gaussian_rd(double rho, double innovation_variance, double d);

}  // namespace mclc
