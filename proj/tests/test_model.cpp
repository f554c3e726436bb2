#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pbm/model.hpp"

using namespace pbm;

TEST_CASE("decoupled bath discretizes to zero couplings") {
  ContinuousBath spec;
  spec.family = OhmicExponential{0.0, 5.0};
  spec.modes = 16;
  const DiscreteBath bath = discretize_bath(spec);
  REQUIRE(bath.count() == 16);
  for (const auto& mode : bath.modes) CHECK(mode.coupling.norm() == 0.0);
}

TEST_CASE("discrete specification passes through unchanged") {
  DiscreteBathSpec spec;
  BathMode mode;
  mode.mass = 1.0;
  mode.frequency = 2.0;
  mode.coupling = Eigen::Vector3d(0.3, 0.0, 0.0);
  spec.modes = {mode};
  const DiscreteBath bath = discretize_bath(spec);
  REQUIRE(bath.count() == 1);
  CHECK(bath.modes[0].frequency == 2.0);
  CHECK(bath.modes[0].coupling == mode.coupling);
}

TEST_CASE("ohmic discretization reproduces the spectral weight") {
  ContinuousBath spec;
  spec.family = OhmicExponential{0.1, 5.0};
  spec.modes = 64;
  spec.pattern = {true, false, false};

  const DiscreteBath bath = discretize_bath(spec);
  double total = 0.0;
  for (const auto& mode : bath.modes)
    total += mode.coupling.squaredNorm() / (mode.mass * mode.frequency);

  const double exact = oracle::ohmic_weight_quadrature(0.1, 5.0);
  CHECK(std::abs(total - exact) / exact < 0.01);

  // trapezoidal binning converges at least first order in 1/N
  auto weight_error = [&](int n) {
    ContinuousBath s = spec;
    s.modes = n;
    double w = 0.0;
    for (const auto& mode : discretize_bath(s).modes)
      w += mode.coupling.squaredNorm() / (mode.mass * mode.frequency);
    return std::abs(w - exact);
  };
  CHECK(weight_error(128) < 0.5 * weight_error(64));
}

TEST_CASE("zero modes with live coupling is an error") {
  ContinuousBath spec;
  spec.family = OhmicExponential{0.1, 5.0};
  spec.modes = 0;
  CHECK_THROWS_AS(discretize_bath(spec), ZeroModes);

  spec.family.gamma = 0.0;
  CHECK(discretize_bath(spec).count() == 0);
}

TEST_CASE("free particle generator") {
  QuadraticModel m;
  m.mass_s = Mass::finite(1.0);
  m.mass_1 = Mass::infinite();
  m.mass_2 = Mass::infinite();
  const DiscreteBath bath = discretize_bath(m.bath);
  const Eigen::MatrixXd g = assemble_generator(m, bath, 0.0);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6, 6);
  expected(kXS, kPS) = 1.0;
  CHECK((g - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("arthurs-kelly generator entries") {
  const QuadraticModel m = QuadraticModel::arthurs_kelly(1.0);
  const DiscreteBath bath = discretize_bath(m.bath);
  const Eigen::MatrixXd g = assemble_generator(m, bath, 0.0);
  CHECK(g(kX1, kXS) == 1.0);  // dX_1/dt = X_S
  CHECK(g(kX2, kPS) == 1.0);  // dX_2/dt = P_S
  CHECK(g(kXS, kP2) == 1.0);  // dX_S/dt = P_2
  CHECK(g(kPS, kP1) == -1.0); // dP_S/dt = -P_1
  Eigen::MatrixXd rest = g;
  rest(kX1, kXS) = rest(kX2, kPS) = rest(kXS, kP2) = rest(kPS, kP1) = 0.0;
  CHECK(rest.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generator is Hamiltonian and matches the Hessian assembly") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const QuadraticModel m = oracle::random_model(rng, trial % 2 == 0);
    const DiscreteBath bath = discretize_bath(m.bath);
    const Eigen::MatrixXd g = assemble_generator(m, bath, 0.3);
    const Eigen::MatrixXd j = symplectic_form(static_cast<int>(g.rows()));

    const Eigen::MatrixXd jg = j * g;
    CHECK((jg - jg.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::MatrixXd ref = oracle::generator_from_hessian(m, bath, 0.3);
    CHECK((g - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("switching the bath off reproduces the closed generator") {
  QuadraticModel open_model = QuadraticModel::arthurs_kelly(1.0);
  ContinuousBath bath;
  bath.family = OhmicExponential{0.0, 5.0};
  bath.modes = 8;
  open_model.bath = bath;

  const QuadraticModel closed_model = QuadraticModel::arthurs_kelly(1.0);
  const Eigen::MatrixXd g_open =
      assemble_generator(open_model, discretize_bath(open_model.bath), 0.0);
  const Eigen::MatrixXd g_closed =
      assemble_generator(closed_model, discretize_bath(closed_model.bath), 0.0);
  CHECK((g_open.topLeftCorner(6, 6) - g_closed).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g_open.topRightCorner(6, g_open.cols() - 6).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g_open.bottomLeftCorner(g_open.rows() - 6, 6).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("validation rejects bad inputs") {
  CHECK_THROWS_AS(Mass::finite(0.0), ValidationError);
  CHECK_THROWS_AS(Mass::finite(-1.0), ValidationError);

  ContinuousBath bad_beta;
  bad_beta.beta = 0.0;
  CHECK_THROWS_AS(validate_bath(BathSpec{bad_beta}), ValidationError);

  PointerPreparation bad_prep{0.0, 0.5};
  CHECK_THROWS_AS(bad_prep.validate(), ValidationError);

  GaussianState impure;
  impure.var_x = 1.0;
  impure.var_p = 1.0;
  impure.pure = true;  // det = 1, not 1/4
  CHECK_THROWS_AS(impure.validate(), ValidationError);

  GaussianState squeezed_below_bound;
  squeezed_below_bound.var_x = 0.1;
  squeezed_below_bound.var_p = 0.1;
  squeezed_below_bound.pure = false;  // det = 0.01 < 1/4
  CHECK_THROWS_AS(squeezed_below_bound.validate(), ValidationError);

  GaussianState ok;
  ok.var_x = 0.5;
  ok.var_p = 0.5;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("piecewise segmentation") {
  const Piecewise<double> f({0.0, 1.0, 2.5}, {1.0, -2.0, 3.0});
  CHECK(f.value(0.0) == 1.0);
  CHECK(f.value(0.999) == 1.0);
  CHECK(f.value(1.0) == -2.0);
  CHECK(f.value(2.5) == 3.0);
  CHECK(f.value(100.0) == 3.0);
  CHECK(f.breakpoints(2.0) == std::vector<double>{1.0});
  CHECK_THROWS_AS(Piecewise<double>({0.5}, {1.0}), ValidationError);
  CHECK_THROWS_AS(Piecewise<double>({0.0, 0.0}, {1.0, 2.0}), ValidationError);
}

TEST_CASE("measured indices") {
  CHECK(measured_indices(MeasurementChoice::x1_x2) == std::array<int, 2>{kX1, kX2});
  CHECK(measured_indices(MeasurementChoice::x1_p2) == std::array<int, 2>{kX1, kP2});
  CHECK(measured_indices(MeasurementChoice::p1_x2) == std::array<int, 2>{kP1, kX2});
  CHECK(measured_indices(MeasurementChoice::p1_p2) == std::array<int, 2>{kP1, kP2});
}
