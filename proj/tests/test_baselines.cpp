#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mclc/baselines.hpp"
#include "mclc/bench.hpp"
#include "mclc/random.hpp"

using namespace mclc;

TEST_CASE("ecsq degenerate single-cell quantizer") {
  // positive samples all land in cell 0 for a huge step
  const SignalBuffer x = SignalBuffer::from_samples({0.5, 1.5, 2.5, 3.0});
  const double q = 1e6;
  const RDCurve curve = ecsq_curve(x, std::vector<double>{q});
  REQUIRE(curve.points.size() == 1);
  CHECK(curve.points[0].rate == 0.0);
  const double rep = 0.5 * q;
  double want = 0.0;
  for (double v : x.samples) want += (v - rep) * (v - rep);
  want /= 4.0;
  CHECK(curve.points[0].distortion == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("ecsq high-rate distortion approaches q^2/12") {
  const SignalBuffer x = generate(SourceSpec::gaussian(0.0, 1.0, 200000, 11));
  for (double q : {0.02, 0.05}) {
    const RDCurve curve = ecsq_curve(x, std::vector<double>{q});
    CHECK(curve.points[0].distortion ==
          doctest::Approx(q * q / 12.0).epsilon(0.10));
  }
}

TEST_CASE("ecsq is deterministic and sorted by distortion") {
  const SignalBuffer x = generate(SourceSpec::laplace(1.0, 5000, 3));
  const std::vector<double> steps{2.0, 0.25, 1.0, 0.5};
  const RDCurve a = ecsq_curve(x, steps);
  const RDCurve b = ecsq_curve(x, steps);
  REQUIRE(a.points.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.points[i].rate == b.points[i].rate);
    CHECK(a.points[i].distortion == b.points[i].distortion);
    if (i) CHECK(a.points[i].distortion >= a.points[i - 1].distortion);
  }
}

TEST_CASE("gaussian closed form") {
  CHECK(gaussian_rd(1.0, 0.25) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gaussian_rd(1.0, 1.0) == 0.0);
  for (int k = 1; k <= 5; ++k)
    CHECK(gaussian_rd(1.0, std::pow(0.25, k)) ==
          doctest::Approx(static_cast<double>(k)).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_rd(1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(gaussian_rd(1.0, 1.5), ParameterError);
}

TEST_CASE("blahut-arimoto reproduces the gaussian closed form") {
  const DiscreteSource src = discretize_gaussian(1.0, 10.0, 1601);
  const DiscreteSource repro = discretize_gaussian(1.0, 10.0, 801);
  const BaPoint p = blahut_arimoto(src, repro.points, 0.25, 1e-5);
  CHECK(p.rate ==
        doctest::Approx(gaussian_rd(1.0, p.distortion)).epsilon(0.0));
  CHECK(std::fabs(p.rate - gaussian_rd(1.0, p.distortion)) < 1e-3);
  CHECK(p.distortion == doctest::Approx(0.25).epsilon(2e-4));
}

TEST_CASE("blahut-arimoto near-zero slope reaches rate zero") {
  const DiscreteSource src = discretize_gaussian(1.0, 8.0, 401);
  const DiscreteSource repro = discretize_gaussian(1.0, 8.0, 201);
  const BaPoint p = blahut_arimoto_slope(src, repro.points, -1e-4, 1e-6);
  CHECK(p.rate < 1e-3);
  // distortion heads toward the best single reproduction point (~variance)
  CHECK(p.distortion > 0.9);
  CHECK(p.distortion < 1.1);
}

TEST_CASE("blahut-arimoto rates fall as distortion grows") {
  const DiscreteSource src = discretize_laplace(1.0, 12.0, 801);
  const DiscreteSource repro = discretize_laplace(1.0, 12.0, 401);
  double prev_rate = 1e300;
  for (double d : {0.2, 0.5, 1.0, 1.5}) {
    const BaPoint p = blahut_arimoto(src, repro.points, d, 1e-4);
    CHECK(p.rate < prev_rate);
    prev_rate = p.rate;
  }
}

TEST_CASE("blahut-arimoto keeps a symmetric optimum for symmetric inputs") {
  const DiscreteSource src = discretize_gaussian(1.0, 8.0, 801);
  const DiscreteSource repro = discretize_gaussian(1.0, 8.0, 401);
  const BaPoint p = blahut_arimoto_slope(src, repro.points, -2.0, 1e-6);
  CHECK(p.rate > 0.0);
  // the induced distortion must not see a sign asymmetry
  const BaPoint q = blahut_arimoto_slope(src, repro.points, -2.0, 1e-6);
  CHECK(p.distortion == q.distortion);
}

TEST_CASE("non-convergence raises with the residual gap") {
  const DiscreteSource src = discretize_gaussian(1.0, 8.0, 401);
  const DiscreteSource repro = discretize_gaussian(1.0, 8.0, 201);
  CHECK_THROWS_AS(blahut_arimoto_slope(src, repro.points, -3.0, 1e-12, 3),
                  ConvergenceError);
}

TEST_CASE("reverse water-filling degenerates to the white closed form") {
  for (double d : {0.05, 0.25, 0.7, 1.0}) {
    CHECK(ar1_gaussian_rd(0.0, 1.0, d) ==
          doctest::Approx(gaussian_rd(1.0, d)).epsilon(1e-9));
  }
}

TEST_CASE("reverse water-filling endpoints") {
  const double process_var = 1.0 / (1.0 - 0.81);
  CHECK(ar1_gaussian_rd(0.9, 1.0, process_var) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(ar1_gaussian_rd(0.9, 1.0, 2.0 * process_var), ParameterError);
  CHECK_THROWS_AS(ar1_gaussian_rd(1.0, 1.0, 0.5), ParameterError);
}

TEST_CASE("reverse water-filling matches a dense quadrature oracle") {
  // Oracle: trapezoid rule on a uniform grid plus its own theta bisection.
  const double rho = 0.9, s2 = 1.0;
  const auto spectrum = [&](double w) {
    return s2 / (1.0 - 2.0 * rho * std::cos(w) + rho * rho);
  };
  const std::size_t grid = 1 << 20;
  const double pi = 3.14159265358979323846;
  const auto oracle_d = [&](double theta) {
    double sum = 0.0;
    for (std::size_t i = 0; i <= grid; ++i) {
      const double w = pi * static_cast<double>(i) / static_cast<double>(grid);
      const double v = std::min(theta, spectrum(w));
      sum += (i == 0 || i == grid) ? 0.5 * v : v;
    }
    return sum / static_cast<double>(grid);
  };
  const auto oracle_r = [&](double theta) {
    double sum = 0.0;
    for (std::size_t i = 0; i <= grid; ++i) {
      const double w = pi * static_cast<double>(i) / static_cast<double>(grid);
      const double v = std::max(0.0, 0.5 * std::log2(spectrum(w) / theta));
      sum += (i == 0 || i == grid) ? 0.5 * v : v;
    }
    return sum / static_cast<double>(grid);
  };
  for (double d : {0.05, 0.3, 1.0, 3.0}) {
    double lo = 1e-9, hi = s2 / ((1 - rho) * (1 - rho));
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (oracle_d(mid) < d ? lo : hi) = mid;
    }
    const double want = oracle_r(0.5 * (lo + hi));
    CHECK(std::fabs(ar1_gaussian_rd(rho, s2, d) - want) < 1e-3);
  }
}

TEST_CASE("water-filling beats the white bound under correlation") {
  // At small D the AR(1) rate is below the white-Gaussian rate at matched
  // variance by about log2(process_var / innov_var) / ... spot-check order
  for (double d : {0.05, 0.1}) {
    const double ar = ar1_gaussian_rd(0.9, 1.0, d);
    const double white = gaussian_rd(1.0 / (1.0 - 0.81), d);
    CHECK(ar < white);
  }
}

TEST_CASE("ecsq lies on or above the gaussian oracle") {
  const SignalBuffer x = generate(SourceSpec::gaussian(0.0, 1.0, 15000, 21));
  std::vector<double> steps;
  for (double q = 0.15; q < 3.0; q *= 1.4) steps.push_back(q);
  const RDCurve curve = ecsq_curve(x, steps);
  for (const auto& p : curve.points) {
    if (p.distortion <= 0.0 || p.distortion >= x.empirical_variance) continue;
    CHECK(p.rate + 0.02 >= gaussian_rd(x.empirical_variance, p.distortion));
  }
}
