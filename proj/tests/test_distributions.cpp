#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "pbm/distributions.hpp"

using namespace pbm;

namespace {

double normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

// Symmetric two-Gaussian mixture used across the convolution tests.
double two_peak(double x) {
  return 0.5 * normal_pdf(x, -1.5, 0.25) + 0.5 * normal_pdf(x, 1.5, 0.25);
}

GridDensity tabulate(double (*f)(double), double lo, double hi, std::size_t n, Axis axis) {
  GridDensity d;
  d.origin = lo;
  d.spacing = (hi - lo) / static_cast<double>(n - 1);
  d.axis = axis;
  d.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.values[i] = f(d.coord(i));
  return d;
}

// Continuum convolution of `f` with a centered Gaussian, fine trapezoid.
double convolution_oracle(double (*f)(double), double x, double delta2, double lo, double hi,
                          std::size_t n) {
  const double h = (hi - lo) / static_cast<double>(n - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = lo + h * static_cast<double>(i);
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    acc += w * f(xi) * normal_pdf(x - xi, 0.0, delta2);
  }
  return acc * h;
}

NoiseCovariance make_cov(double dx2, double dp2, double dxp, double bath_share = 0.0) {
  NoiseCovariance cov;
  cov.delta_x2 = dx2;
  cov.delta_p2 = dp2;
  cov.delta_xp = dxp;
  cov.bath << bath_share * dx2, bath_share * dxp, bath_share * dxp, bath_share * dp2;
  cov.pointer = cov.total() - cov.bath;
  return cov;
}

}  // namespace

TEST_CASE("filter coefficients of the closed arthurs-kelly covariance") {
  const GaussianFilterCoefficients fc = filter_coefficients(make_cov(0.625, 0.625, 0.0));
  CHECK(fc.b_p == doctest::Approx(-0.3125).epsilon(1e-14));
  CHECK(fc.a_p == doctest::Approx(-0.3125).epsilon(1e-14));
  CHECK(fc.c_p == 0.0);
  CHECK(fc.a_b == 0.0);
  CHECK(fc.b_b == 0.0);
  CHECK(fc.c_b == 0.0);
}

TEST_CASE("coefficient round trip is the identity") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> var(0.3, 3.0);
  std::uniform_real_distribution<double> frac(0.0, 0.6);
  for (int trial = 0; trial < 20; ++trial) {
    const double dx2 = var(rng), dp2 = var(rng);
    std::uniform_real_distribution<double> cross(-0.4 * std::sqrt(dx2 * dp2),
                                                 0.4 * std::sqrt(dx2 * dp2));
    const NoiseCovariance cov = make_cov(dx2, dp2, cross(rng), frac(rng));
    const GaussianFilterCoefficients fc = filter_coefficients(cov);
    const NoiseCovariance back = fc.to_noise();
    CHECK(back.delta_x2 == doctest::Approx(cov.delta_x2).epsilon(1e-12));
    CHECK(back.delta_p2 == doctest::Approx(cov.delta_p2).epsilon(1e-12));
    CHECK(back.delta_xp == doctest::Approx(cov.delta_xp).epsilon(1e-12));
    CHECK((back.pointer - cov.pointer).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.bath - cov.bath).cwiseAbs().maxCoeff() < 1e-12);

    const GaussianFilterCoefficients fc2 = filter_coefficients(back);
    CHECK(fc2.a_p == doctest::Approx(fc.a_p).epsilon(1e-12));
    CHECK(fc2.b_p == doctest::Approx(fc.b_p).epsilon(1e-12));
    CHECK(fc2.c_p == doctest::Approx(fc.c_p).epsilon(1e-12));
  }
}

TEST_CASE("gaussian broadening adds variances") {
  const SystemState state = GaussianState{0.0, 0.0, 0.5, 0.5, 0.0, true};
  const Density out = broadened_marginal(state, 0.5, Axis::position);
  const auto& g = std::get<GaussianDensity>(out);
  CHECK(g.variance == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.mean == 0.0);
}

TEST_CASE("zero noise returns the tabulated density unchanged") {
  TabulatedState state;
  state.position = tabulate(two_peak, -6.0, 6.0, 1024, Axis::position);
  state.position.normalize();
  state.momentum = GaussianDensity{0.0, 2.0, Axis::momentum}.tabulate_auto(1024);
  state.momentum.normalize();

  const Density out = broadened_marginal(SystemState{state}, 0.0, Axis::position);
  const auto& grid = std::get<GridDensity>(out);
  CHECK(grid.origin == state.position.origin);
  CHECK(grid.values == state.position.values);
}

TEST_CASE("tabulated convolution matches the quadrature oracle") {
  TabulatedState state;
  state.position = tabulate(two_peak, -8.0, 8.0, 2048, Axis::position);
  state.position.normalize();
  state.momentum = GaussianDensity{0.0, 2.0, Axis::momentum}.tabulate_auto(1024);
  state.momentum.normalize();

  const double delta2 = 0.25;
  const Density out = broadened_marginal(SystemState{state}, delta2, Axis::position);
  const auto& grid = std::get<GridDensity>(out);

  for (std::size_t k = 0; k < grid.count(); k += grid.count() / 33) {
    const double x = grid.coord(k);
    const double want = convolution_oracle(two_peak, x, delta2, -8.0, 8.0, 1 << 15);
    CHECK(grid.values[k] == doctest::Approx(want).epsilon(0).scale(1.0).epsilon(1e-8));
  }
  CHECK(std::abs(grid.mass() - 1.0) < 1e-6);
}

TEST_CASE("variance composition for tabulated inputs") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> delta_dist(0.05, 1.5);
  TabulatedState state;
  state.position = tabulate(two_peak, -9.0, 9.0, 2048, Axis::position);
  state.position.normalize();
  state.momentum = GaussianDensity{0.0, 2.0, Axis::momentum}.tabulate_auto(1024);
  state.momentum.normalize();
  const double var_in = state.position.variance();

  for (int trial = 0; trial < 5; ++trial) {
    const double delta2 = delta_dist(rng);
    const Density out = broadened_marginal(SystemState{state}, delta2, Axis::position);
    const auto& grid = std::get<GridDensity>(out);
    CHECK(grid.variance() == doctest::Approx(var_in + delta2).epsilon(1e-8));
  }
}

TEST_CASE("broadening a gaussian grid against the closed form") {
  // tabulated Gaussian in, convolved result must match the analytic Gaussian
  TabulatedState state;
  state.position = GaussianDensity{0.3, 0.7, Axis::position}.tabulate_auto(2048, 9.0);
  state.position.normalize();
  state.momentum = GaussianDensity{0.0, 1.0, Axis::momentum}.tabulate_auto(512);
  state.momentum.normalize();

  const double delta2 = 0.4;
  const auto& grid = std::get<GridDensity>(
      broadened_marginal(SystemState{state}, delta2, Axis::position));
  for (std::size_t k = 0; k < grid.count(); k += 101) {
    const double want = normal_pdf(grid.coord(k), 0.3, 0.7 + delta2);
    CHECK(grid.values[k] == doctest::Approx(want).epsilon(0).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("narrow explicit grids are rejected") {
  TabulatedState state;
  state.position = tabulate(two_peak, -8.0, 8.0, 1024, Axis::position);
  state.position.normalize();
  state.momentum = GaussianDensity{0.0, 2.0, Axis::momentum}.tabulate_auto(512);
  state.momentum.normalize();

  GridSpec narrow;
  narrow.origin = -1.0;
  narrow.spacing = 2.0 / 255.0;
  narrow.count = 256;
  CHECK_THROWS_AS(broadened_marginal(SystemState{state}, 0.25, Axis::position, narrow),
                  GridTooSmall);
}

TEST_CASE("joint distribution composes moments") {
  const SystemState state = GaussianState{0.0, 0.0, 0.5, 0.5, 0.0, true};
  const GaussianFilterCoefficients fc = filter_coefficients(make_cov(0.5, 0.5, 0.0));
  const JointGaussian joint = joint_distribution(state, fc);
  CHECK((joint.covariance - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-14);

  // marginals of the joint equal the broadened marginals
  const auto& gx = std::get<GaussianDensity>(broadened_marginal(state, 0.5, Axis::position));
  const auto& gp = std::get<GaussianDensity>(broadened_marginal(state, 0.5, Axis::momentum));
  CHECK(joint.covariance(0, 0) == doctest::Approx(gx.variance).epsilon(1e-14));
  CHECK(joint.covariance(1, 1) == doctest::Approx(gp.variance).epsilon(1e-14));
  CHECK(joint.mean(0) == gx.mean);
  CHECK(joint.mean(1) == gp.mean);
}

TEST_CASE("correlated noise tilts the filter with matching sign") {
  const GaussianFilterCoefficients plus = filter_coefficients(make_cov(1.0, 1.0, 0.4));
  CHECK(plus.gamma > 0.0);
  const GaussianFilterCoefficients minus = filter_coefficients(make_cov(1.0, 1.0, -0.4));
  CHECK(minus.gamma < 0.0);

  const SystemState state = GaussianState{0.0, 0.0, 0.5, 0.5, 0.0, true};
  const JointGaussian joint = joint_distribution(state, plus);
  CHECK(joint.covariance(0, 1) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("joint distribution rejects tabulated states") {
  TabulatedState state;
  state.position = tabulate(two_peak, -8.0, 8.0, 512, Axis::position);
  state.position.normalize();
  state.momentum = GaussianDensity{0.0, 2.0, Axis::momentum}.tabulate_auto(512);
  state.momentum.normalize();
  CHECK_THROWS_AS(joint_distribution(SystemState{state}, filter_coefficients(make_cov(1, 1, 0))),
                  NonGaussianState);
}

TEST_CASE("density file round trip") {
  const GridDensity d = GaussianDensity{0.1, 0.9, Axis::position}.tabulate_auto(257);
  const std::string path = "test_density_roundtrip.dat";
  write_density(path, d);
  const GridDensity back = read_density(path, Axis::position);
  std::remove(path.c_str());
  REQUIRE(back.count() == d.count());
  CHECK(back.origin == doctest::Approx(d.origin).epsilon(1e-15));
  CHECK(back.spacing == doctest::Approx(d.spacing).epsilon(1e-12));
  for (std::size_t i = 0; i < d.count(); i += 16)
    CHECK(back.values[i] == doctest::Approx(d.values[i]).epsilon(1e-15));
}

TEST_CASE("grid density validation") {
  GridDensity d = GaussianDensity{0.0, 1.0, Axis::position}.tabulate_auto(512);
  CHECK_NOTHROW(d.validate(1e-6));
  d.values[5] = -0.1;
  CHECK_THROWS_AS(d.validate(1e-6), ValidationError);
  d.values[5] = 0.1;  // breaks normalization instead
  CHECK_THROWS_AS(d.validate(1e-6), ValidationError);
}
