#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pbm/dynamics.hpp"
#include "pbm/model.hpp"

namespace pbm {

enum class CovarianceRoute { direct, kernel };

/// Symmetrized covariance of the noise operators, split into the pointer
/// and bath contributions.
struct NoiseCovariance {
  double delta_x2 = 0.0;
  double delta_p2 = 0.0;
  double delta_xp = 0.0;
  Eigen::Matrix2d pointer = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d bath = Eigen::Matrix2d::Zero();
  CovarianceRoute route = CovarianceRoute::direct;

  Eigen::Matrix2d total() const {
    Eigen::Matrix2d m;
    m << delta_x2, delta_xp, delta_xp, delta_p2;
    return m;
  }
};

/// Initial covariance of the pointer quadruple (X_1, X_2, P_1, P_2) for
/// squeezed vacuum pointers.
Eigen::Matrix4d pointer_covariance(const PointerPreparation& prep);

/// Symmetrized bath force autocorrelation nu(tau) sampled on a uniform grid.
struct NoiseKernel {
  double beta = 1.0;
  double tau_origin = 0.0;
  double tau_spacing = 1.0;
  std::vector<Eigen::Matrix3d> samples;
  DiscreteBath source;

  double tau(std::size_t k) const { return tau_origin + tau_spacing * static_cast<double>(k); }
};

NoiseKernel noise_kernel(const DiscreteBath& bath, double beta, double tau_origin,
                         double tau_spacing, std::size_t count);

/// nu(tau) evaluated at one lag from the discrete mode sum.
Eigen::Matrix3d noise_kernel_at(const DiscreteBath& bath, double beta, double tau);

/// Noise covariance at measurement time t.
///
/// direct: propagate the exact initial covariances (pointer matrix V and
/// thermal per-mode bath moments) through the effective inferred map.
/// kernel: B V B^T plus the double time integral of
/// g(t1) g(t2) Lambda(t,t1) nu(t1-t2) Lambda(t,t2)^T, trapezoidal on the
/// propagator grid. With check_grid set, dropping every other interior point
/// must move the integral by less than 1e-4 relative (GridTooCoarse
/// otherwise).
NoiseCovariance noise_covariance(const Propagator& prop, const InferenceCoefficients& coeff,
                                 const PointerPreparation& prep, const DiscreteBath& bath,
                                 double beta, double t, CovarianceRoute route,
                                 bool check_grid = true);

struct NoiseBoundReport {
  double product = 0.0;  // delta_X * delta_P
  bool robertson_ok = false;
  bool schroedinger_ok = false;
};

/// Checks delta_X delta_P >= 1/2 and delta_X^2 delta_P^2 >= delta_XP^2 + 1/4
/// (both up to 1e-9 absolute). Throws InconsistentInput if the covariance is
/// not positive semidefinite.
NoiseBoundReport check_noise_bound(const NoiseCovariance& cov);

}  // namespace pbm
