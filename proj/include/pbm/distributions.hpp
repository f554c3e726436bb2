#pragma once

#include <Eigen/Dense>
#include <optional>

#include "pbm/density.hpp"
#include "pbm/model.hpp"
#include "pbm/noise.hpp"

namespace pbm {

/// Gaussian-filter coefficients of the joint-distribution route. The pointer
/// and bath blocks are linear relabelings of the corresponding covariance
/// contributions; the combined block describes the filter the system Wigner
/// function is convolved with.
struct GaussianFilterCoefficients {
  double a_p = 0.0, b_p = 0.0, c_p = 0.0, d_p = 0.0;
  double a_b = 0.0, b_b = 0.0, c_b = 0.0, d_b = 0.0;
  double delta_x2 = 0.0;  // combined filter width in X
  double delta_p2 = 0.0;  // combined filter width in P
  double gamma = 0.0;     // cross coefficient of the filter exponent
  double d = 0.0;         // 4(a_p+a_b)(b_p+b_b) - (c_p+c_b)^2

  /// Noise terms recovered from the coefficients.
  NoiseCovariance to_noise() const;
};

GaussianFilterCoefficients filter_coefficients(const NoiseCovariance& cov);

/// Explicit output grid for broadened marginals; when absent the grid spans
/// mean +/- 8 effective standard deviations with `points` samples.
struct GridSpec {
  double origin = 0.0;
  double spacing = 0.0;
  std::size_t count = 0;
};

/// Broadened marginal: the state's position (or momentum) density convolved
/// with a Gaussian of variance delta2. Gaussian states stay closed-form;
/// tabulated states are convolved by direct summation. Throws GridTooSmall
/// if more than 1e-6 probability leaks past the grid edges.
Density broadened_marginal(const SystemState& state, double delta2, Axis axis,
                           std::optional<GridSpec> grid = std::nullopt,
                           std::size_t points = 4096);

struct JointGaussian {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
};

/// Joint distribution of the inferred pair for Gaussian system states: the
/// Wigner covariance plus the noise covariance. Throws NonGaussianState for
/// tabulated states.
JointGaussian joint_distribution(const SystemState& state, const GaussianFilterCoefficients& fc);

}  // namespace pbm
