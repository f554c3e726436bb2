#include "pbm/noise.hpp"

#include <cmath>

namespace pbm {

namespace {

double coth(double x) { return 1.0 / std::tanh(x); }

Eigen::Matrix2d symmetrized(const Eigen::Matrix2d& m) {
  return 0.5 * (m + m.transpose());
}

// Pointer contribution B V B^T shared by both routes.
Eigen::Matrix2d pointer_part(const InferenceCoefficients& coeff, const PointerPreparation& prep) {
  const Eigen::Matrix4d v = pointer_covariance(prep);
  return symmetrized(coeff.b * v * coeff.b.transpose());
}

// Bath part of the direct route: push the thermal per-mode moments through
// the bath columns of the effective inferred map A W Phi(t,0).
Eigen::Matrix2d direct_bath_part(const Propagator& prop, const InferenceCoefficients& coeff,
                                 const DiscreteBath& bath, double beta, int i) {
  const int n = bath.count();
  if (n == 0) return Eigen::Matrix2d::Zero();
  const RowBlock rows = measured_rows(prop, coeff.choice, i);
  const RowBlock effective = coeff.a * rows;
  Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
  for (int j = 0; j < n; ++j) {
    const BathMode& mode = bath.modes[j];
    const double th = coth(0.5 * beta * mode.frequency);
    const double q2 = th / (2.0 * mode.mass * mode.frequency);
    const double k2 = 0.5 * th * mode.mass * mode.frequency;
    const Eigen::Vector2d cq = effective.col(kSystemPointerDim + j);
    const Eigen::Vector2d ck = effective.col(kSystemPointerDim + n + j);
    acc += q2 * cq * cq.transpose() + k2 * ck * ck.transpose();
  }
  return symmetrized(acc);
}

// Double trapezoidal integral over the index subset `idx` of the grid.
Eigen::Matrix2d kernel_double_integral(const std::vector<LambdaBlock>& lambdas,
                                       const std::vector<double>& times,
                                       const std::vector<double>& gvals,
                                       const std::vector<int>& idx,
                                       const DiscreteBath& bath, double beta) {
  const int m = static_cast<int>(idx.size()) - 1;
  std::vector<double> sub_times(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) sub_times[k] = times[idx[k]];
  const std::vector<double> w = trapezoid_weights(sub_times, m);

  std::vector<LambdaBlock> l(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k)
    l[k] = w[k] * gvals[idx[k]] * lambdas[idx[k]];

  // nu depends only on the lag; uniform subsets hit few distinct lags, so
  // precompute by lag index when the spacing is uniform.
  const bool uniform = [&] {
    if (sub_times.size() < 3) return true;
    const double d0 = sub_times[1] - sub_times[0];
    for (std::size_t k = 2; k < sub_times.size(); ++k)
      if (std::abs((sub_times[k] - sub_times[k - 1]) - d0) > 1e-9 * std::abs(d0)) return false;
    return true;
  }();

  std::vector<Eigen::Matrix3d> by_lag;
  if (uniform) {
    by_lag.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
      by_lag[k] = noise_kernel_at(bath, beta, sub_times[k] - sub_times[0]);
  }

  Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
  for (int a = 0; a <= m; ++a) {
    const Eigen::Matrix3d& nu0 =
        uniform ? by_lag[0] : noise_kernel_at(bath, beta, 0.0);
    acc += l[a] * nu0 * l[a].transpose();
    for (int b = 0; b < a; ++b) {
      const Eigen::Matrix3d nu = uniform
                                     ? by_lag[a - b]
                                     : noise_kernel_at(bath, beta, sub_times[a] - sub_times[b]);
      const Eigen::Matrix2d cross = l[a] * nu * l[b].transpose();
      acc += cross + cross.transpose();
    }
  }
  return symmetrized(acc);
}

struct KernelBathResult {
  Eigen::Matrix2d fine = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d coarse = Eigen::Matrix2d::Zero();
  bool checked = false;
};

KernelBathResult kernel_bath_part(const Propagator& prop, const InferenceCoefficients& coeff,
                                  const DiscreteBath& bath, double beta, int i, bool check_grid) {
  KernelBathResult out;
  if (bath.count() == 0 || i == 0) return out;

  const auto lambdas = lambda_profile(prop, coeff, coeff.t);
  const auto& times = prop.grid();
  std::vector<double> gvals(static_cast<std::size_t>(i) + 1);
  for (int j = 0; j <= i; ++j) gvals[j] = bath.switch_fn.value(times[j]);

  std::vector<int> all(static_cast<std::size_t>(i) + 1);
  for (int j = 0; j <= i; ++j) all[j] = j;
  out.fine = kernel_double_integral(lambdas, times, gvals, all, bath, beta);

  // The coarse partner (every other interior point) feeds the grid
  // self-consistency check against the full covariance scale.
  if (check_grid && i >= 4) {
    std::vector<int> coarse;
    for (int j = 0; j < i; j += 2) coarse.push_back(j);
    coarse.push_back(i);
    out.coarse = kernel_double_integral(lambdas, times, gvals, coarse, bath, beta);
    out.checked = true;
  }
  return out;
}

}  // namespace

Eigen::Matrix4d pointer_covariance(const PointerPreparation& prep) {
  prep.validate();
  Eigen::Matrix4d v = Eigen::Matrix4d::Zero();
  v(0, 0) = prep.var1;
  v(1, 1) = prep.var2;
  v(2, 2) = 0.25 / prep.var1;
  v(3, 3) = 0.25 / prep.var2;
  return v;
}

Eigen::Matrix3d noise_kernel_at(const DiscreteBath& bath, double beta, double tau) {
  if (!(beta > 0.0)) throw ValidationError("noise kernel: beta must be positive");
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  for (const BathMode& mode : bath.modes) {
    const double w = 0.5 * coth(0.5 * beta * mode.frequency) *
                     std::cos(mode.frequency * tau) / (mode.mass * mode.frequency);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(mode.coupling, w);
  }
  return acc.selfadjointView<Eigen::Lower>();
}

NoiseKernel noise_kernel(const DiscreteBath& bath, double beta, double tau_origin,
                         double tau_spacing, std::size_t count) {
  if (!(beta > 0.0)) throw ValidationError("noise kernel: beta must be positive");
  NoiseKernel out;
  out.beta = beta;
  out.tau_origin = tau_origin;
  out.tau_spacing = tau_spacing;
  out.source = bath;
  out.samples.resize(count);
  for (std::size_t k = 0; k < count; ++k)
    out.samples[k] = noise_kernel_at(bath, beta, out.tau(k));
  return out;
}

NoiseCovariance noise_covariance(const Propagator& prop, const InferenceCoefficients& coeff,
                                 const PointerPreparation& prep, const DiscreteBath& bath,
                                 double beta, double t, CovarianceRoute route, bool check_grid) {
  if (!coeff.exists)
    throw NotInvertible("noise covariance needs existing inference coefficients");
  const int i = prop.index_of(t);

  NoiseCovariance out;
  out.route = route;
  out.pointer = pointer_part(coeff, prep);
  out.bath = route == CovarianceRoute::direct
                 ? direct_bath_part(prop, coeff, bath, beta, i)
                 : kernel_bath_part(prop, coeff, bath, beta, i, check_grid);

  const Eigen::Matrix2d total = out.pointer + out.bath;
  out.delta_x2 = total(0, 0);
  out.delta_p2 = total(1, 1);
  out.delta_xp = total(0, 1);
  return out;
}

NoiseBoundReport check_noise_bound(const NoiseCovariance& cov) {
  const double scale = std::max({std::abs(cov.delta_x2), std::abs(cov.delta_p2), 1.0});
  const double det = cov.delta_x2 * cov.delta_p2 - cov.delta_xp * cov.delta_xp;
  if (cov.delta_x2 < -1e-12 * scale || cov.delta_p2 < -1e-12 * scale ||
      det < -1e-12 * scale * scale)
    throw InconsistentInput("noise covariance is not positive semidefinite");

  NoiseBoundReport report;
  report.product = std::sqrt(std::max(0.0, cov.delta_x2 * cov.delta_p2));
  report.robertson_ok = report.product >= 0.5 - 1e-9;
  report.schroedinger_ok = det >= 0.25 - 1e-9;
  return report;
}

}  // namespace pbm
