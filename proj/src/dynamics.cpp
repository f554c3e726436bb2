#include "pbm/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

namespace pbm {

namespace {

constexpr double kGridTol = 1e-9;

long long bits_of(double x) {
  long long out;
  std::memcpy(&out, &x, sizeof(out));
  return out;
}

double defect_of(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& j) {
  return (phi.transpose() * j * phi - j).cwiseAbs().maxCoeff();
}

}  // namespace

Propagator::Propagator(std::vector<double> grid, std::vector<Eigen::MatrixXd> distinct,
                       std::vector<int> step_of, int bath_modes)
    : grid_(std::move(grid)),
      distinct_(std::move(distinct)),
      step_of_(std::move(step_of)),
      bath_modes_(bath_modes) {
  dim_ = kSystemPointerDim + 2 * bath_modes_;
  j_form_ = symplectic_form(dim_);
  for (const auto& s : distinct_)
    max_step_defect_ = std::max(max_step_defect_, defect_of(s, j_form_));
}

int Propagator::index_of(double t) const {
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), t - kGridTol);
  if (it == grid_.end() || std::abs(*it - t) > kGridTol)
    throw ValidationError("time is not a grid point: " + std::to_string(t));
  return static_cast<int>(it - grid_.begin());
}

Eigen::MatrixXd Propagator::map(int i, int j) const {
  if (i < j) throw ValidationError("propagator map requires i >= j");
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(dim_, dim_);
  for (int k = j; k < i; ++k) phi = step(k) * phi;
  return phi;
}

std::vector<RowBlock> Propagator::rows_back(const RowBlock& rows, int i) const {
  std::vector<RowBlock> out(static_cast<std::size_t>(i) + 1);
  out[i] = rows;
  for (int j = i - 1; j >= 0; --j) out[j] = out[j + 1] * step(j);
  return out;
}

double Propagator::map_defect(int i, int j) const { return defect_of(map(i, j), j_form_); }

Propagator propagate(const QuadraticModel& model, const DiscreteBath& bath,
                     std::vector<double> grid) {
  model.validate();
  if (grid.size() < 1 || grid.front() != 0.0)
    throw ValidationError("propagation grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ValidationError("propagation grid must increase");

  const double t_max = grid.back();
  for (double b : model.breakpoints(t_max)) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), b - kGridTol);
    if (it == grid.end() || std::abs(*it - b) > kGridTol)
      throw SegmentMismatch("coupling discontinuity at t = " + std::to_string(b) +
                            " is not a grid point");
  }

  std::vector<Eigen::MatrixXd> distinct;
  std::vector<int> step_of(grid.size() > 0 ? grid.size() - 1 : 0);

  // One exponential per (segment, step length); repeated steps share it.
  std::map<std::pair<long long, long long>, int> cache;
  auto segment_key = [&model, t_max](double t_mid) {
    const auto breaks = model.breakpoints(t_max);
    long long seg = 0;
    for (double b : breaks)
      if (t_mid >= b) ++seg;
    return seg;
  };

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double dt = grid[i + 1] - grid[i];
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    const auto key = std::make_pair(segment_key(mid), bits_of(dt));
    const auto found = cache.find(key);
    if (found != cache.end()) {
      step_of[i] = found->second;
      continue;
    }
    Eigen::MatrixXd gen = assemble_generator(model, bath, mid);
    distinct.push_back((gen * dt).exp());
    step_of[i] = static_cast<int>(distinct.size()) - 1;
    cache.emplace(key, step_of[i]);
  }

  return Propagator(std::move(grid), std::move(distinct), std::move(step_of), bath.count());
}

std::vector<double> make_grid(const QuadraticModel& model, double t_max, int steps) {
  if (!(t_max > 0.0) || steps < 1) throw ValidationError("make_grid: bad arguments");
  std::vector<double> anchors = model.breakpoints(t_max);
  anchors.insert(anchors.begin(), 0.0);
  anchors.push_back(t_max);
  const double target = t_max / steps;
  std::vector<double> grid;
  for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
    const double lo = anchors[a], hi = anchors[a + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / target - 1e-12)));
    for (int k = 0; k < n; ++k) grid.push_back(lo + (hi - lo) * k / n);
  }
  grid.push_back(t_max);
  return grid;
}

RowBlock measured_rows(const Propagator& prop, MeasurementChoice choice, int i) {
  const auto idx = measured_indices(choice);
  RowBlock rows = RowBlock::Zero(2, prop.dim());
  rows(0, idx[0]) = 1.0;
  rows(1, idx[1]) = 1.0;
  for (int j = i - 1; j >= 0; --j) rows = rows * prop.step(j);
  return rows;
}

InferenceCoefficients inference_coefficients(const Propagator& prop, MeasurementChoice choice,
                                             double t) {
  const int i = prop.index_of(t);
  const RowBlock rows = measured_rows(prop, choice, i);

  Eigen::Matrix2d system_block;
  system_block << rows(0, kXS), rows(0, kPS), rows(1, kXS), rows(1, kPS);

  InferenceCoefficients out;
  out.t = t;
  out.choice = choice;
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(system_block);
  const double smin = svd.singularValues()(1);
  const double smax = svd.singularValues()(0);
  out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  out.exists = std::isfinite(out.condition) && out.condition <= kConditionLimit;
  if (!out.exists) return out;

  out.a = system_block.inverse();
  Eigen::Matrix<double, 2, 4> pointer_block;
  pointer_block.col(0) = rows.col(kX1);
  pointer_block.col(1) = rows.col(kX2);
  pointer_block.col(2) = rows.col(kP1);
  pointer_block.col(3) = rows.col(kP2);
  out.b = out.a * pointer_block;
  return out;
}

namespace {

LambdaBlock lambda_from_rows(const InferenceCoefficients& coeff, const RowBlock& rows) {
  Eigen::Matrix<double, 2, 3> force_block;
  force_block.col(0) = rows.col(kPS);
  force_block.col(1) = rows.col(kP1);
  force_block.col(2) = rows.col(kP2);
  return coeff.a * force_block;
}

}  // namespace

std::vector<LambdaBlock> lambda_profile(const Propagator& prop, const InferenceCoefficients& coeff,
                                        double t) {
  if (!coeff.exists) throw NotInvertible("inference coefficients do not exist at t = " +
                                         std::to_string(t));
  const int i = prop.index_of(t);
  const auto idx = measured_indices(coeff.choice);
  RowBlock w = RowBlock::Zero(2, prop.dim());
  w(0, idx[0]) = 1.0;
  w(1, idx[1]) = 1.0;
  const auto chain = prop.rows_back(w, i);
  std::vector<LambdaBlock> out(chain.size());
  for (std::size_t j = 0; j < chain.size(); ++j) out[j] = lambda_from_rows(coeff, chain[j]);
  return out;
}

LambdaBlock lambda_kernel(const Propagator& prop, const InferenceCoefficients& coeff, double t,
                          double s) {
  if (!coeff.exists) throw NotInvertible("inference coefficients do not exist at t = " +
                                         std::to_string(t));
  const int i = prop.index_of(t);
  const int j = prop.index_of(s);
  if (j > i) throw ValidationError("lambda_kernel requires s <= t");
  const auto idx = measured_indices(coeff.choice);
  RowBlock rows = RowBlock::Zero(2, prop.dim());
  rows(0, idx[0]) = 1.0;
  rows(1, idx[1]) = 1.0;
  for (int k = i - 1; k >= j; --k) rows = rows * prop.step(k);
  return lambda_from_rows(coeff, rows);
}

std::vector<double> trapezoid_weights(const std::vector<double>& times, int last) {
  std::vector<double> w(static_cast<std::size_t>(last) + 1, 0.0);
  if (last == 0) return w;
  w[0] = 0.5 * (times[1] - times[0]);
  for (int i = 1; i < last; ++i) w[i] = 0.5 * (times[i + 1] - times[i - 1]);
  w[last] = 0.5 * (times[last] - times[last - 1]);
  return w;
}

Eigen::Vector2d shift(const Propagator& prop, const InferenceCoefficients& coeff,
                      const Eigen::Vector4d& pointer_means,
                      const std::function<Eigen::Vector3d(double)>& force_mean) {
  if (!coeff.exists) throw NotInvertible("inference coefficients do not exist");
  Eigen::Vector2d out = coeff.b * pointer_means;
  if (force_mean) {
    const int i = prop.index_of(coeff.t);
    const auto lambdas = lambda_profile(prop, coeff, coeff.t);
    const auto w = trapezoid_weights(prop.grid(), i);
    for (int j = 0; j <= i; ++j) out += w[j] * (lambdas[j] * force_mean(prop.grid()[j]));
  }
  return out;
}

}  // namespace pbm
