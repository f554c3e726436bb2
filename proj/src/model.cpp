#include "pbm/model.hpp"

#include <algorithm>
#include <cmath>

namespace pbm {

double bath_beta(const BathSpec& spec) {
  return std::visit([](const auto& b) { return b.beta; }, spec);
}

void validate_bath(const BathSpec& spec) {
  if (const auto* c = std::get_if<ContinuousBath>(&spec)) {
    if (!(c->beta > 0.0) || !std::isfinite(c->beta))
      throw ValidationError("bath: beta must be positive");
    if (c->modes < 0) throw ValidationError("bath: mode count must be >= 0");
    if (!(c->family.gamma >= 0.0) || !std::isfinite(c->family.gamma))
      throw ValidationError("bath: gamma must be >= 0");
    if (!(c->family.cutoff > 0.0) || !std::isfinite(c->family.cutoff))
      throw ValidationError("bath: cutoff must be positive");
  } else {
    const auto& d = std::get<DiscreteBathSpec>(spec);
    if (!(d.beta > 0.0) || !std::isfinite(d.beta))
      throw ValidationError("bath: beta must be positive");
    for (const auto& m : d.modes) {
      if (!(m.mass > 0.0)) throw ValidationError("bath: mode masses must be positive");
      if (!(m.frequency > 0.0)) throw ValidationError("bath: mode frequencies must be positive");
      if (!m.coupling.allFinite()) throw ValidationError("bath: non-finite coupling");
    }
  }
}

void QuadraticModel::validate() const {
  // Mass construction already rejects non-positive values; piecewise
  // construction rejects non-finite entries and bad segmentation.
  validate_bath(bath);
}

std::vector<double> QuadraticModel::breakpoints(double t_max) const {
  std::vector<double> out;
  auto absorb = [&out, t_max](const std::vector<double>& b) {
    out.insert(out.end(), b.begin(), b.end());
  };
  absorb(c_s.breakpoints(t_max));
  absorb(c_1.breakpoints(t_max));
  absorb(c_2.breakpoints(t_max));
  absorb(coupling.breakpoints(t_max));
  std::visit([&](const auto& b) { absorb(b.switch_fn.breakpoints(t_max)); }, bath);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

QuadraticModel QuadraticModel::arthurs_kelly(double kappa) {
  if (kappa == 0.0 || !std::isfinite(kappa))
    throw ValidationError("arthurs-kelly: kappa must be nonzero and finite");
  QuadraticModel m;
  m.mass_s = Mass::infinite();
  m.mass_1 = Mass::infinite();
  m.mass_2 = Mass::infinite();
  CouplingMatrix c = CouplingMatrix::Zero();
  c(0, 2) = kappa;  // X_S P_1
  c(1, 3) = kappa;  // P_S P_2
  m.coupling = Piecewise<CouplingMatrix>::constant(c);
  return m;
}

void PointerPreparation::validate() const {
  if (!(var1 > 0.0) || !std::isfinite(var1) || !(var2 > 0.0) || !std::isfinite(var2))
    throw ValidationError("pointer variances must be positive and finite");
}

void GaussianState::validate() const {
  if (!std::isfinite(mean_x) || !std::isfinite(mean_p))
    throw ValidationError("gaussian state: non-finite means");
  const double det = var_x * var_p - cov_xp * cov_xp;
  if (!(var_x > 0.0) || !(var_p > 0.0) || !(det > 0.0))
    throw ValidationError("gaussian state: covariance must be positive definite");
  // A Gaussian density matrix requires det >= 1/4; pure states sit exactly
  // on the boundary.
  if (pure) {
    if (std::abs(det - 0.25) > 1e-9)
      throw ValidationError("gaussian state: pure state needs var_x var_p - cov_xp^2 = 1/4");
  } else if (det < 0.25 - 1e-12) {
    throw ValidationError("gaussian state: covariance violates the uncertainty bound");
  }
}

void TabulatedState::validate() const {
  if (position.axis != Axis::position || momentum.axis != Axis::momentum)
    throw ValidationError("tabulated state: axis labels do not match roles");
  position.validate(1e-8);
  momentum.validate(1e-8);
}

void validate_state(const SystemState& state) {
  std::visit([](const auto& s) { s.validate(); }, state);
}

std::array<int, 2> measured_indices(MeasurementChoice choice) {
  switch (choice) {
    case MeasurementChoice::x1_x2: return {kX1, kX2};
    case MeasurementChoice::x1_p2: return {kX1, kP2};
    case MeasurementChoice::p1_x2: return {kP1, kX2};
    case MeasurementChoice::p1_p2: return {kP1, kP2};
  }
  throw ValidationError("bad measurement choice");
}

const char* measurement_name(MeasurementChoice choice) {
  switch (choice) {
    case MeasurementChoice::x1_x2: return "x1 x2";
    case MeasurementChoice::x1_p2: return "x1 p2";
    case MeasurementChoice::p1_x2: return "p1 x2";
    case MeasurementChoice::p1_p2: return "p1 p2";
  }
  return "?";
}

DiscreteBath discretize_bath(const BathSpec& spec) {
  validate_bath(spec);
  if (const auto* d = std::get_if<DiscreteBathSpec>(&spec))
    return DiscreteBath{d->modes, d->switch_fn};

  const auto& c = std::get<ContinuousBath>(spec);
  if (c.modes == 0) {
    if (c.family.gamma > 0.0)
      throw ZeroModes("continuous bath with gamma > 0 discretized with zero modes");
    return DiscreteBath{{}, c.switch_fn};
  }

  Eigen::Vector3d pattern;
  for (int a = 0; a < 3; ++a) pattern[a] = c.pattern[a] ? 1.0 : 0.0;

  DiscreteBath out;
  out.switch_fn = c.switch_fn;
  out.modes.reserve(c.modes);
  const double span = 8.0 * c.family.cutoff;
  const double width = span / c.modes;
  for (int j = 0; j < c.modes; ++j) {
    BathMode mode;
    mode.mass = 1.0;
    mode.frequency = (j + 0.5) * width;
    // trapezoidal bin weight of the spectral density
    const double w =
        0.5 * width * (c.family.density(j * width) + c.family.density((j + 1) * width));
    mode.coupling = std::sqrt(mode.mass * mode.frequency * w) * pattern;
    out.modes.push_back(mode);
  }
  return out;
}

Eigen::MatrixXd assemble_generator(const QuadraticModel& model, const DiscreteBath& bath, double t) {
  const int n = bath.count();
  const int dim = kSystemPointerDim + 2 * n;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);

  // kinetic terms
  g(kXS, kPS) = model.mass_s.inverse();
  g(kX1, kP1) = model.mass_1.inverse();
  g(kX2, kP2) = model.mass_2.inverse();

  // quadratic potentials C_k(t) X_k^2
  g(kPS, kXS) -= 2.0 * model.c_s.value(t);
  g(kP1, kX1) -= 2.0 * model.c_1.value(t);
  g(kP2, kX2) -= 2.0 * model.c_2.value(t);

  // bilinear system-pointer block (X_S, P_S) C(t) (X_1, X_2, P_1, P_2)^T
  const CouplingMatrix c = model.coupling.value(t);
  const std::array<int, 4> pcol = {kX1, kX2, kP1, kP2};
  for (int k = 0; k < 4; ++k) {
    g(kXS, pcol[k]) += c(1, k);  // dX_S/dt gains dH/dP_S terms
    g(kPS, pcol[k]) -= c(0, k);  // dP_S/dt loses dH/dX_S terms
  }
  g(kX1, kXS) += c(0, 2);
  g(kX1, kPS) += c(1, 2);
  g(kX2, kXS) += c(0, 3);
  g(kX2, kPS) += c(1, 3);
  g(kP1, kXS) -= c(0, 0);
  g(kP1, kPS) -= c(1, 0);
  g(kP2, kXS) -= c(0, 1);
  g(kP2, kPS) -= c(1, 1);

  // bath block and the position-position coupling q^T g(t) (X_S, X_1, X_2)^T
  const double sw = bath.switch_fn.value(t);
  const std::array<int, 3> xrow = {kXS, kX1, kX2};
  const std::array<int, 3> prow = {kPS, kP1, kP2};
  for (int j = 0; j < n; ++j) {
    const BathMode& mode = bath.modes[j];
    const int q = kSystemPointerDim + j;
    const int k = kSystemPointerDim + n + j;
    g(q, k) = 1.0 / mode.mass;
    g(k, q) = -mode.mass * mode.frequency * mode.frequency;
    for (int a = 0; a < 3; ++a) {
      const double ga = sw * mode.coupling[a];
      g(prow[a], q) -= ga;
      g(k, xrow[a]) -= ga;
    }
  }
  return g;
}

Eigen::MatrixXd symplectic_form(int dim) {
  if (dim < kSystemPointerDim || (dim - kSystemPointerDim) % 2 != 0)
    throw ValidationError("symplectic form: bad dimension");
  const int n = (dim - kSystemPointerDim) / 2;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < 3; ++a) {
    j(a, a + 3) = 1.0;
    j(a + 3, a) = -1.0;
  }
  for (int b = 0; b < n; ++b) {
    j(kSystemPointerDim + b, kSystemPointerDim + n + b) = 1.0;
    j(kSystemPointerDim + n + b, kSystemPointerDim + b) = -1.0;
  }
  return j;
}

}  // namespace pbm
