#include "pbm/entropy.hpp"

#include <cmath>

#include "pbm/kernels.hpp"

namespace pbm {

namespace {

double gaussian_entropy(double variance) { return 0.5 * std::log(2.0 * M_PI * M_E * variance); }

double plogp_term(double p) { return p >= 1e-300 ? p * std::log(p) : 0.0; }

double grid_entropy(const GridDensity& d) {
  const double mass = d.mass();
  if (std::abs(mass - 1.0) > 1e-6)
    throw NotNormalized("grid density mass " + std::to_string(mass) + " is not 1");
  const double total = kernels::plogp_sum(d.values.data(), d.values.size());
  const double ends = 0.5 * (plogp_term(d.values.front()) + plogp_term(d.values.back()));
  return -d.spacing * (total - ends);
}

}  // namespace

double differential_entropy(const Density& density) {
  return std::visit(
      [](const auto& d) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, GaussianDensity>)
          return gaussian_entropy(d.variance);
        else
          return grid_entropy(d);
      },
      density);
}

EntropyReport collective_entropy(const Density& marginal_x, const Density& marginal_p,
                                 const NoiseCovariance& cov) {
  EntropyReport report;
  report.s_x = differential_entropy(marginal_x);
  report.s_p = differential_entropy(marginal_p);
  report.s_total = report.s_x + report.s_p;
  const double product = std::sqrt(std::max(0.0, cov.delta_x2 * cov.delta_p2));
  report.bound = 1.0 + std::log(2.0 * M_PI * (product + 0.5));
  report.gap = report.s_total - report.bound;
  report.lambda_opt = 1.0 / (1.0 + 2.0 * product);
  report.saturated = report.gap < 1e-6;
  return report;
}

double lieb_bound(double s_f, double s_g, double lambda) {
  if (!(lambda >= 0.0) || !(lambda <= 1.0))
    throw LambdaOutOfRange("weighting parameter must lie in [0, 1]");
  const double xlnx = lambda > 0.0 ? lambda * std::log(lambda) : 0.0;
  const double ylny = lambda < 1.0 ? (1.0 - lambda) * std::log(1.0 - lambda) : 0.0;
  return lambda * s_f + (1.0 - lambda) * s_g - 0.5 * (xlnx + ylny);
}

HirschmanReport hirschman_check(const SystemState& state) {
  validate_state(state);
  HirschmanReport report;
  if (const auto* g = std::get_if<GaussianState>(&state)) {
    report.s_x = gaussian_entropy(g->var_x);
    report.s_p = gaussian_entropy(g->var_p);
  } else {
    const auto& tab = std::get<TabulatedState>(state);
    report.s_x = grid_entropy(tab.position);
    report.s_p = grid_entropy(tab.momentum);
  }
  report.sum = report.s_x + report.s_p;
  report.bound = 1.0 + std::log(M_PI);
  report.ok = report.sum >= report.bound - 1e-6;
  return report;
}

GaussianState minimal_entropy_state(const NoiseCovariance& cov) {
  if (!(cov.delta_x2 > 0.0) || !(cov.delta_p2 > 0.0))
    throw InconsistentInput("minimal entropy state needs positive noise terms");
  GaussianState state;
  state.var_x = std::sqrt(cov.delta_x2 / cov.delta_p2) * 0.5;
  state.var_p = 0.25 / state.var_x;
  state.pure = true;
  return state;
}

}  // namespace pbm
