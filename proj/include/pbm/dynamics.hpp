#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pbm/model.hpp"

namespace pbm {

using RowBlock = Eigen::Matrix<double, 2, Eigen::Dynamic>;
using LambdaBlock = Eigen::Matrix<double, 2, 3>;

/// Linear phase-space flow on a time grid. Each grid interval is advanced by
/// the matrix exponential of its (piecewise-constant) generator; identical
/// intervals share one exponential. Maps between grid times are exact
/// products of the stored steps.
class Propagator {
 public:
  Propagator(std::vector<double> grid, std::vector<Eigen::MatrixXd> distinct,
             std::vector<int> step_of, int bath_modes);

  const std::vector<double>& grid() const { return grid_; }
  int dim() const { return dim_; }
  int bath_modes() const { return bath_modes_; }

  /// Index of grid time t; throws if t is not a grid point.
  int index_of(double t) const;

  /// Step matrix Phi(t_{i+1}, t_i).
  const Eigen::MatrixXd& step(int i) const { return distinct_[step_of_.at(i)]; }

  /// Phi(t_i, t_j) for i >= j.
  Eigen::MatrixXd map(int i, int j) const;

  /// r_j = rows * Phi(t_i, t_j) for j = 0..i, one backward sweep.
  std::vector<RowBlock> rows_back(const RowBlock& rows, int i) const;

  /// max_j of || step_j^T J step_j - J ||_inf over the distinct steps.
  double max_step_defect() const { return max_step_defect_; }

  /// || Phi(t_i,t_j)^T J Phi(t_i,t_j) - J ||_inf.
  double map_defect(int i, int j) const;

 private:
  std::vector<double> grid_;
  std::vector<Eigen::MatrixXd> distinct_;
  std::vector<int> step_of_;  // interval index -> distinct matrix index
  int dim_ = 0;
  int bath_modes_ = 0;
  double max_step_defect_ = 0.0;
  Eigen::MatrixXd j_form_;
};

/// Builds the propagator on a strictly increasing grid starting at 0. The
/// grid must contain every coupling discontinuity (SegmentMismatch otherwise).
Propagator propagate(const QuadraticModel& model, const DiscreteBath& bath,
                     std::vector<double> grid);

/// Convenience: uniform grid with `steps` intervals on [0, t_max], merged
/// with the model's breakpoints (each breakpoint becomes a grid point).
std::vector<double> make_grid(const QuadraticModel& model, double t_max, int steps);

struct InferenceCoefficients {
  double t = 0.0;
  MeasurementChoice choice = MeasurementChoice::x1_x2;
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  Eigen::Matrix<double, 2, 4> b = Eigen::Matrix<double, 2, 4>::Zero();
  double condition = std::numeric_limits<double>::infinity();
  bool exists = false;
};

inline constexpr double kConditionLimit = 1e8;

/// W * Phi(t_i, 0): the measured observables expressed in initial data.
RowBlock measured_rows(const Propagator& prop, MeasurementChoice choice, int i);

/// A(t), B(t) from the propagator blocks; `exists` is false when the system
/// block is not invertible (condition number above kConditionLimit).
InferenceCoefficients inference_coefficients(const Propagator& prop, MeasurementChoice choice,
                                             double t);

/// Lambda(t, t_j) for every grid point t_j <= t. Throws NotInvertible when
/// the coefficients do not exist.
std::vector<LambdaBlock> lambda_profile(const Propagator& prop, const InferenceCoefficients& coeff,
                                        double t);

/// Single response block Lambda(t, s), both times on the grid, 0 <= s <= t.
LambdaBlock lambda_kernel(const Propagator& prop, const InferenceCoefficients& coeff, double t,
                          double s);

/// Expectation shift s(t) = B(t) <J> + integral of Lambda(t,s) <xi(s)> ds
/// (trapezoidal on the grid).
Eigen::Vector2d shift(const Propagator& prop, const InferenceCoefficients& coeff,
                      const Eigen::Vector4d& pointer_means,
                      const std::function<Eigen::Vector3d(double)>& force_mean);

/// Trapezoidal weights of an arbitrary partition t_0 < ... < t_m.
std::vector<double> trapezoid_weights(const std::vector<double>& times, int last);

}  // namespace pbm
