#include "pbm/distributions.hpp"

#include <cmath>

#include "pbm/kernels.hpp"

namespace pbm {

NoiseCovariance GaussianFilterCoefficients::to_noise() const {
  NoiseCovariance cov;
  cov.delta_x2 = -2.0 * (b_p + b_b);
  cov.delta_p2 = -2.0 * (a_p + a_b);
  cov.delta_xp = c_p + c_b;
  cov.pointer << -2.0 * b_p, c_p, c_p, -2.0 * a_p;
  cov.bath << -2.0 * b_b, c_b, c_b, -2.0 * a_b;
  return cov;
}

GaussianFilterCoefficients filter_coefficients(const NoiseCovariance& cov) {
  GaussianFilterCoefficients fc;
  fc.b_p = -0.5 * cov.pointer(0, 0);
  fc.a_p = -0.5 * cov.pointer(1, 1);
  fc.c_p = cov.pointer(0, 1);
  fc.d_p = 4.0 * fc.a_p * fc.b_p - fc.c_p * fc.c_p;
  fc.b_b = -0.5 * cov.bath(0, 0);
  fc.a_b = -0.5 * cov.bath(1, 1);
  fc.c_b = cov.bath(0, 1);
  fc.d_b = 4.0 * fc.a_b * fc.b_b - fc.c_b * fc.c_b;

  const double a = fc.a_p + fc.a_b;
  const double b = fc.b_p + fc.b_b;
  const double c = fc.c_p + fc.c_b;
  fc.d = 4.0 * a * b - c * c;
  fc.delta_x2 = a != 0.0 ? -fc.d / (2.0 * a) : 0.0;
  fc.delta_p2 = b != 0.0 ? -fc.d / (2.0 * b) : 0.0;
  fc.gamma = fc.d != 0.0 ? c / fc.d : 0.0;
  return fc;
}

namespace {

// Direct-summation convolution of a tabulated density with a centered
// Gaussian of variance delta2, trapezoidal in the input grid.
GridDensity convolve(const GridDensity& in, double delta2, const GridSpec& spec) {
  const std::size_t n_in = in.count();

  // trapezoid weights folded into the source once
  std::vector<double> src(n_in);
  for (std::size_t j = 0; j < n_in; ++j) src[j] = in.values[j] * in.spacing;
  src.front() *= 0.5;
  src.back() *= 0.5;

  const double inv_two = 1.0 / (2.0 * delta2);
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * delta2);
  // Gaussian support window: beyond 16 standard deviations everything is
  // far below any tolerance in play.
  const double window = 16.0 * std::sqrt(delta2);

  GridDensity out;
  out.origin = spec.origin;
  out.spacing = spec.spacing;
  out.axis = in.axis;
  out.values.assign(spec.count, 0.0);

  std::vector<double> taps(n_in);
  for (std::size_t k = 0; k < spec.count; ++k) {
    const double x = out.coord(k);
    // input index range within the window
    const double j_lo = (x - window - in.origin) / in.spacing;
    const double j_hi = (x + window - in.origin) / in.spacing;
    const std::size_t j0 =
        j_lo <= 0.0 ? 0 : std::min<std::size_t>(n_in, static_cast<std::size_t>(j_lo));
    const std::size_t j1 =
        j_hi <= 0.0 ? 0 : std::min<std::size_t>(n_in, static_cast<std::size_t>(j_hi) + 2);
    if (j0 >= j1) continue;

    // exp(-(x - x_j)^2 / (2 delta2)) as a quadratic in the local index
    const double a = x - (in.origin + in.spacing * static_cast<double>(j0));
    const double c0 = -inv_two * a * a;
    const double c1 = inv_two * 2.0 * a * in.spacing;
    const double c2 = -inv_two * in.spacing * in.spacing;
    kernels::exp_quadratic(taps.data(), j1 - j0, c0, c1, c2);
    out.values[k] = norm * kernels::dot(src.data() + j0, taps.data(), j1 - j0);
  }
  return out;
}

GridSpec auto_grid(double mean, double sigma_eff, std::size_t points) {
  GridSpec spec;
  spec.count = points;
  spec.origin = mean - 8.0 * sigma_eff;
  spec.spacing = 16.0 * sigma_eff / static_cast<double>(points - 1);
  return spec;
}

}  // namespace

Density broadened_marginal(const SystemState& state, double delta2, Axis axis,
                           std::optional<GridSpec> grid, std::size_t points) {
  if (!(delta2 >= 0.0) || !std::isfinite(delta2))
    throw ValidationError("broadened marginal: noise variance must be >= 0");

  if (const auto* g = std::get_if<GaussianState>(&state)) {
    g->validate();
    GaussianDensity out;
    out.axis = axis;
    out.mean = axis == Axis::position ? g->mean_x : g->mean_p;
    out.variance = (axis == Axis::position ? g->var_x : g->var_p) + delta2;
    return out;
  }

  const auto& tab = std::get<TabulatedState>(state);
  tab.validate();
  const GridDensity& in = axis == Axis::position ? tab.position : tab.momentum;
  if (delta2 == 0.0) return in;

  const double sigma_eff = std::sqrt(in.variance() + delta2);
  const GridSpec spec = grid ? *grid : auto_grid(in.mean(), sigma_eff, points);
  if (spec.count < 2 || !(spec.spacing > 0.0))
    throw ValidationError("broadened marginal: bad output grid");

  GridDensity out = convolve(in, delta2, spec);
  const double leak = std::abs(1.0 - out.mass());
  if (leak > 1e-6)
    throw GridTooSmall("broadened marginal leaks " + std::to_string(leak) +
                       " probability past the grid edges");
  return out;
}

JointGaussian joint_distribution(const SystemState& state, const GaussianFilterCoefficients& fc) {
  const auto* g = std::get_if<GaussianState>(&state);
  if (!g) throw NonGaussianState("joint distribution requires a Gaussian system state");
  g->validate();

  const NoiseCovariance noise = fc.to_noise();
  JointGaussian joint;
  joint.mean << g->mean_x, g->mean_p;
  Eigen::Matrix2d wigner;
  wigner << g->var_x, g->cov_xp, g->cov_xp, g->var_p;
  joint.covariance = wigner + noise.total();
  return joint;
}

}  // namespace pbm
