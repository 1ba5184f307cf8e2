#include "mclc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace mclc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

}  // namespace

void RDCurve::sort_points() {
  std::stable_sort(points.begin(), points.end(),
                   [](const RDPoint& a, const RDPoint& b) {
                     return a.distortion < b.distortion;
                   });
}

RDCurve ecsq_curve(const SignalBuffer& x, std::span<const double> steps) {
  RDCurve curve;
  curve.label = "ecsq";
  curve.provenance["method"] = "uniform mid-rise scalar quantizer + ideal entropy coder";
  for (double q : steps) {
    if (!(q > 0.0)) throw ParameterError("steps: quantizer steps must be positive");
    std::unordered_map<std::int64_t, std::uint64_t> hist;
    double sum_sq = 0.0;
    for (double v : x.samples) {
      const std::int64_t cell = static_cast<std::int64_t>(std::floor(v / q));
      ++hist[cell];
      const double rep = (static_cast<double>(cell) + 0.5) * q;
      const double d = v - rep;
      sum_sq += d * d;
    }
    const double n = static_cast<double>(x.size());
    double rate = 0.0;
    for (const auto& [cell, count] : hist) {
      const double p = static_cast<double>(count) / n;
      rate -= p * std::log2(p);
    }
    curve.points.push_back(
        make_rd_point(rate, sum_sq / n, x.empirical_variance));
  }
  curve.sort_points();
  return curve;
}

double gaussian_rd(double variance, double d) {
  if (!(variance > 0.0)) throw ParameterError("variance: must be positive");
  if (!(d > 0.0) || d > variance)
    throw ParameterError("D: must lie in (0, variance]");
  return 0.5 * std::log2(variance / d);
}

namespace {

DiscreteSource discretize(double halfwidth, std::size_t npoints,
                          double (*density)(double, double), double param) {
  if (npoints < 3) throw ParameterError("npoints: grid too small");
  DiscreteSource src;
  src.points.resize(npoints);
  src.pmf.resize(npoints);
  const double step = 2.0 * halfwidth / static_cast<double>(npoints - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < npoints; ++i) {
    src.points[i] = -halfwidth + step * static_cast<double>(i);
    src.pmf[i] = density(src.points[i], param);
    total += src.pmf[i];
  }
  for (double& p : src.pmf) p /= total;
  return src;
}

double gaussian_density(double v, double variance) {
  return std::exp(-0.5 * v * v / variance);
}

double laplace_density(double v, double scale) {
  return std::exp(-std::fabs(v) / scale);
}

}  // namespace

DiscreteSource discretize_gaussian(double variance, double halfwidth,
                                   std::size_t npoints) {
  if (!(variance > 0.0)) throw ParameterError("variance: must be positive");
  return discretize(halfwidth, npoints, gaussian_density, variance);
}

DiscreteSource discretize_laplace(double scale, double halfwidth,
                                  std::size_t npoints) {
  if (!(scale > 0.0)) throw ParameterError("scale: must be positive");
  return discretize(halfwidth, npoints, laplace_density, scale);
}

namespace {

struct BaWork {
  std::vector<double> kernel;  // [x][y], exp(-s d(x,y))
  std::vector<double> q;       // reproduction distribution
  std::vector<double> cx;      // sum_y q A
  std::vector<double> ay;      // sum_x p A / c
};

// One BA pass; returns the duality gap in bits.
double ba_iterate(const DiscreteSource& src, std::size_t ny, BaWork& w) {
  const std::size_t nx = src.points.size();
  for (std::size_t xi = 0; xi < nx; ++xi) {
    const double* row = &w.kernel[xi * ny];
    double c = 0.0;
    for (std::size_t yi = 0; yi < ny; ++yi) c += w.q[yi] * row[yi];
    w.cx[xi] = c;
  }
  std::fill(w.ay.begin(), w.ay.end(), 0.0);
  for (std::size_t xi = 0; xi < nx; ++xi) {
    const double* row = &w.kernel[xi * ny];
    const double scale = src.pmf[xi] / w.cx[xi];
    for (std::size_t yi = 0; yi < ny; ++yi) w.ay[yi] += scale * row[yi];
  }
  double amax = 0.0;
  for (std::size_t yi = 0; yi < ny; ++yi) {
    w.q[yi] *= w.ay[yi];
    if (w.ay[yi] > amax) amax = w.ay[yi];
  }
  // renormalize to absorb rounding
  double qsum = 0.0;
  for (double v : w.q) qsum += v;
  for (double& v : w.q) v /= qsum;
  return std::log2(amax);
}

BaPoint ba_finish(const DiscreteSource& src, std::span<const double> repro,
                  const BaWork& w, double beta, std::uint32_t iters,
                  double gap) {
  const std::size_t nx = src.points.size();
  const std::size_t ny = repro.size();
  // Output marginal, then rate and distortion of the induced channel.
  std::vector<double> marginal(ny, 0.0);
  for (std::size_t xi = 0; xi < nx; ++xi) {
    const double* row = &w.kernel[xi * ny];
    const double scale = src.pmf[xi] / w.cx[xi];
    for (std::size_t yi = 0; yi < ny; ++yi)
      marginal[yi] += scale * w.q[yi] * row[yi];
  }
  double rate = 0.0;
  double dist = 0.0;
  for (std::size_t xi = 0; xi < nx; ++xi) {
    const double* row = &w.kernel[xi * ny];
    const double inv_c = 1.0 / w.cx[xi];
    for (std::size_t yi = 0; yi < ny; ++yi) {
      const double cond = w.q[yi] * row[yi] * inv_c;
      if (cond <= 0.0 || marginal[yi] <= 0.0) continue;
      const double joint = src.pmf[xi] * cond;
      rate += joint * std::log2(cond / marginal[yi]);
      const double diff = src.points[xi] - repro[yi];
      dist += joint * diff * diff;
    }
  }
  BaPoint point;
  point.rate = std::max(0.0, rate);
  point.distortion = dist;
  point.beta = beta;
  point.iterations = iters;
  point.gap_bits = gap;
  return point;
}

void ba_fill_kernel(const DiscreteSource& src, std::span<const double> repro,
                    double s_nats, BaWork& w) {
  const std::size_t nx = src.points.size();
  const std::size_t ny = repro.size();
  w.kernel.resize(nx * ny);
  for (std::size_t xi = 0; xi < nx; ++xi)
    for (std::size_t yi = 0; yi < ny; ++yi) {
      const double diff = src.points[xi] - repro[yi];
      w.kernel[xi * ny + yi] = std::exp(-s_nats * diff * diff);
    }
}

BaPoint ba_solve(const DiscreteSource& src, std::span<const double> repro,
                 double beta, double tol, std::uint32_t max_iterations,
                 BaWork& w) {
  const std::size_t ny = repro.size();
  const double s_nats = -beta * kLn2;
  ba_fill_kernel(src, repro, s_nats, w);
  if (w.q.size() != ny) {
    w.q.assign(ny, 1.0 / static_cast<double>(ny));
  }
  w.cx.assign(src.points.size(), 0.0);
  w.ay.assign(ny, 0.0);
  double gap = 0.0;
  for (std::uint32_t it = 1; it <= max_iterations; ++it) {
    gap = ba_iterate(src, ny, w);
    if (gap <= tol) return ba_finish(src, repro, w, beta, it, gap);
  }
  throw ConvergenceError("blahut-arimoto: gap " + std::to_string(gap) +
                         " bits after " + std::to_string(max_iterations) +
                         " iterations");
}

}  // namespace

BaPoint blahut_arimoto_slope(const DiscreteSource& source,
                             std::span<const double> reproduction, double beta,
                             double tol, std::uint32_t max_iterations) {
  if (!(beta < 0.0)) throw ParameterError("beta: slope must be negative");
  if (!(tol > 0.0)) throw ParameterError("tol: must be positive");
  if (source.points.size() != source.pmf.size() || source.points.empty())
    throw ParameterError("source: inconsistent grid");
  BaWork w;
  return ba_solve(source, reproduction, beta, tol, max_iterations, w);
}

BaPoint blahut_arimoto(const DiscreteSource& source,
                       std::span<const double> reproduction, double target_d,
                       double tol, std::uint32_t max_iterations) {
  if (!(target_d > 0.0)) throw ParameterError("D: must be positive");
  if (!(tol > 0.0)) throw ParameterError("tol: must be positive");
  // Distortion decreases as |beta| grows; bisect on log|beta|. The work
  // buffer is reused so each solve warm-starts from the previous q.
  BaWork w;
  double lo = 1e-3, hi = 1e4;  // |beta| bracket
  BaPoint point;
  for (std::uint32_t it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    point = ba_solve(source, reproduction, -mid, tol, max_iterations, w);
    const double rel =
        (point.distortion - target_d) / std::max(target_d, 1e-300);
    if (std::fabs(rel) <= 1e-4) return point;
    if (point.distortion > target_d)
      lo = mid;  // need steeper slope
    else
      hi = mid;
    if (hi / lo < 1.0 + 1e-12) break;
  }
  return point;
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by Newton
// iteration on the Legendre recurrence.
void gauss_legendre(std::size_t n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double wgt = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = wgt;
    weights[n - 1 - i] = wgt;
  }
}

double integrate(double a, double b, const auto& f) {
  static thread_local std::vector<double> nodes, weights;
  if (nodes.size() != 256) gauss_legendre(256, nodes, weights);
  const double mid = 0.5 * (a + b);
  const double halfw = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    sum += weights[i] * f(mid + halfw * nodes[i]);
  return sum * halfw;
}

}  // namespace

double ar1_gaussian_rd(double rho, double innovation_variance, double d) {
  if (!(std::fabs(rho) < 1.0)) throw ParameterError("rho: need |rho| < 1");
  if (!(innovation_variance > 0.0))
    throw ParameterError("innovation_variance: must be positive");
  const double s2 = innovation_variance;
  const double ra = std::fabs(rho);  // spectrum of -rho mirrors omega -> pi-omega
  const double process_var = s2 / (1.0 - ra * ra);
  if (!(d > 0.0) || d > process_var)
    throw ParameterError("D: must lie in (0, process variance]");
  if (ra < 1e-14) return gaussian_rd(s2, d);

  const auto spectrum = [&](double w) {
    return s2 / (1.0 - 2.0 * ra * std::cos(w) + ra * ra);
  };
  const double s_max = s2 / ((1.0 - ra) * (1.0 - ra));
  // Closed form of the spectral integral from 0 to x.
  const auto spectral_integral = [&](double x) {
    if (x >= kPi) return kPi * s2 / (1.0 - ra * ra);
    const double t = ((1.0 + ra) / (1.0 - ra)) * std::tan(0.5 * x);
    return (2.0 * s2 / (1.0 - ra * ra)) * std::atan(t);
  };
  const auto water_d = [&](double theta) {
    // omega* where S crosses theta; S is decreasing in omega for ra > 0.
    const double arg = (1.0 + ra * ra - s2 / theta) / (2.0 * ra);
    const double wstar = std::acos(std::clamp(arg, -1.0, 1.0));
    return (theta * wstar + (spectral_integral(kPi) - spectral_integral(wstar))) /
           kPi;
  };

  double lo = 1e-300, hi = s_max;
  for (int it = 0; it < 200; ++it) {
    const double theta = 0.5 * (lo + hi);
    if (water_d(theta) < d)
      lo = theta;
    else
      hi = theta;
  }
  const double theta = 0.5 * (lo + hi);
  const double arg = (1.0 + ra * ra - s2 / theta) / (2.0 * ra);
  const double wstar = std::acos(std::clamp(arg, -1.0, 1.0));
  if (wstar <= 0.0) return 0.0;
  const double rate = integrate(0.0, wstar, [&](double w) {
    return 0.5 * std::log2(spectrum(w) / theta);
  });
  return std::max(0.0, rate / kPi);
}

}  // namespace mclc
