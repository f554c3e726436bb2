#pragma once

#include <Eigen/Dense>
#include <array>
#include <variant>
#include <vector>

#include "pbm/density.hpp"
#include "pbm/errors.hpp"
#include "pbm/piecewise.hpp"

namespace pbm {

// Phase-space layout throughout the library:
//   (X_S, X_1, X_2, P_S, P_1, P_2, q_1..q_N, k_1..k_N)
inline constexpr int kXS = 0;
inline constexpr int kX1 = 1;
inline constexpr int kX2 = 2;
inline constexpr int kPS = 3;
inline constexpr int kP1 = 4;
inline constexpr int kP2 = 5;
inline constexpr int kSystemPointerDim = 6;

using CouplingMatrix = Eigen::Matrix<double, 2, 4>;

/// Particle mass; `infinite` drops the kinetic term entirely, which is how
/// the pure Arthurs-Kelly limit 1/M -> 0 is encoded.
struct Mass {
  double value = 1.0;
  bool is_infinite = false;

  static Mass finite(double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("mass must be positive and finite");
    return Mass{v, false};
  }
  static Mass infinite() { return Mass{0.0, true}; }
  double inverse() const { return is_infinite ? 0.0 : 1.0 / value; }
};

struct OhmicExponential {
  double gamma = 0.0;   // coupling strength, >= 0
  double cutoff = 1.0;  // cutoff frequency, > 0
  double density(double omega) const { return gamma * omega * std::exp(-omega / cutoff); }
};

struct ContinuousBath {
  OhmicExponential family;
  double beta = 1.0;  // inverse temperature
  int modes = 0;      // discretization count N; 0 means closed measurement
  Piecewise<double> switch_fn = Piecewise<double>::constant(1.0);
  std::array<bool, 3> pattern{true, true, true};  // which of X_S, X_1, X_2 couple
};

struct BathMode {
  double mass = 1.0;
  double frequency = 1.0;
  Eigen::Vector3d coupling = Eigen::Vector3d::Zero();  // column of the N x 3 matrix g
};

struct DiscreteBathSpec {
  std::vector<BathMode> modes;
  double beta = 1.0;
  Piecewise<double> switch_fn = Piecewise<double>::constant(1.0);
};

using BathSpec = std::variant<ContinuousBath, DiscreteBathSpec>;

double bath_beta(const BathSpec& spec);
void validate_bath(const BathSpec& spec);

/// Discretized bath as consumed by the dynamics and noise modules.
struct DiscreteBath {
  std::vector<BathMode> modes;
  Piecewise<double> switch_fn = Piecewise<double>::constant(1.0);
  int count() const { return static_cast<int>(modes.size()); }
};

struct QuadraticModel {
  Mass mass_s = Mass::finite(1.0);
  Mass mass_1 = Mass::finite(1.0);
  Mass mass_2 = Mass::finite(1.0);
  Piecewise<double> c_s = Piecewise<double>::constant(0.0);
  Piecewise<double> c_1 = Piecewise<double>::constant(0.0);
  Piecewise<double> c_2 = Piecewise<double>::constant(0.0);
  Piecewise<CouplingMatrix> coupling = Piecewise<CouplingMatrix>::constant(CouplingMatrix::Zero());
  BathSpec bath = ContinuousBath{};

  void validate() const;

  /// All coupling discontinuities in (0, t_max), sorted and deduplicated.
  std::vector<double> breakpoints(double t_max) const;

  /// Arthurs-Kelly interaction kappa (X_S P_1 + P_S P_2) with infinite masses.
  static QuadraticModel arthurs_kelly(double kappa);
};

struct PointerPreparation {
  double var1 = 0.5;  // sigma_1^2
  double var2 = 0.5;  // sigma_2^2
  void validate() const;
};

struct GaussianState {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.5;
  double var_p = 0.5;
  double cov_xp = 0.0;
  bool pure = true;
  void validate() const;
};

struct TabulatedState {
  GridDensity position;
  GridDensity momentum;
  void validate() const;
};

using SystemState = std::variant<GaussianState, TabulatedState>;

void validate_state(const SystemState& state);

enum class MeasurementChoice { x1_x2, x1_p2, p1_x2, p1_p2 };

/// Phase-space indices of the two measured pointer observables.
std::array<int, 2> measured_indices(MeasurementChoice choice);
const char* measurement_name(MeasurementChoice choice);

/// Discretize a bath specification into explicit modes. The Ohmic family is
/// binned on a uniform frequency grid over (0, 8 * cutoff] with mode
/// frequencies at bin midpoints and per-mode weight from the trapezoidal bin
/// integral of the spectral density. Discrete specifications pass through.
DiscreteBath discretize_bath(const BathSpec& spec);

/// Generator G(t) of the stacked phase-space vector: dz/dt = G(t) z.
Eigen::MatrixXd assemble_generator(const QuadraticModel& model, const DiscreteBath& bath, double t);

/// Symplectic form J for the stacked layout of dimension 6 + 2N.
Eigen::MatrixXd symplectic_form(int dim);

}  // namespace pbm
