#pragma once

#include "pbm/density.hpp"
#include "pbm/model.hpp"
#include "pbm/noise.hpp"

namespace pbm {

struct EntropyReport {
  double s_x = 0.0;         // marginal entropy of inferred position, nats
  double s_p = 0.0;         // marginal entropy of inferred momentum, nats
  double s_total = 0.0;     // collective entropy
  double bound = 0.0;       // 1 + ln[2 pi (delta_X delta_P + 1/2)]
  double gap = 0.0;         // s_total - bound
  double lambda_opt = 0.0;  // 1 / (1 + 2 delta_X delta_P)
  bool saturated = false;
};

/// -integral p ln p, trapezoidal for grids (entries below 1e-300 contribute
/// zero), closed form for Gaussians. Throws NotNormalized when a grid
/// density's mass is off by more than 1e-6.
double differential_entropy(const Density& density);

/// Collective entropy of the broadened marginals plus the bound, gap and
/// optimal weighting parameter from the same noise covariance.
EntropyReport collective_entropy(const Density& marginal_x, const Density& marginal_p,
                                 const NoiseCovariance& cov);

/// lambda S_f + (1-lambda) S_g - [lambda ln lambda + (1-lambda) ln(1-lambda)]/2
/// with 0 ln 0 = 0. Throws LambdaOutOfRange outside [0, 1].
double lieb_bound(double s_f, double s_g, double lambda);

struct HirschmanReport {
  double s_x = 0.0;
  double s_p = 0.0;
  double sum = 0.0;
  double bound = 0.0;  // 1 + ln(pi)
  bool ok = false;
};

/// Position/momentum entropy sum of the system state against 1 + ln(pi).
HirschmanReport hirschman_check(const SystemState& state);

/// Pure Gaussian state saturating the collective-entropy bound for the given
/// noise terms: var_x = delta_X / (2 delta_P), var_x var_p = 1/4.
GaussianState minimal_entropy_state(const NoiseCovariance& cov);

}  // namespace pbm
