#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pbm/distributions.hpp"
#include "pbm/dynamics.hpp"
#include "pbm/entropy.hpp"
#include "pbm/model.hpp"
#include "pbm/noise.hpp"

namespace pbm {

enum class BathFamily { none, ohmic };

/// One scenario: model, bath, pointers, system state, measurement choice,
/// sweep and numerics. Parsed from a block-structured text file; unknown
/// blocks or keys are errors.
struct ScenarioConfig {
  // [model]
  Mass mass_s = Mass::finite(1.0);
  Mass mass_1 = Mass::finite(1.0);
  Mass mass_2 = Mass::finite(1.0);
  Piecewise<double> c_s = Piecewise<double>::constant(0.0);
  Piecewise<double> c_1 = Piecewise<double>::constant(0.0);
  Piecewise<double> c_2 = Piecewise<double>::constant(0.0);
  std::optional<double> ak_kappa;
  std::optional<CouplingMatrix> coupling;

  // [bath]
  BathFamily family = BathFamily::none;
  double gamma = 0.0;
  double omega_c = 5.0;
  int modes = 0;
  double beta = 1.0;
  std::array<bool, 3> pattern{true, true, true};
  Piecewise<double> switch_fn = Piecewise<double>::constant(1.0);

  // [pointers]
  PointerPreparation pointers{0.25, 0.25};

  // [system]
  SystemState system = GaussianState{};
  std::optional<std::string> position_file;
  std::optional<std::string> momentum_file;

  // [measurement]
  MeasurementChoice choice = MeasurementChoice::x1_x2;

  // [sweep]
  double t_start = 0.1;
  double t_stop = 2.0;
  int sweep_steps = 20;

  // [numerics]
  int grid_points = 4096;
  int time_steps = 2000;
  bool check_grid = true;

  // [output]
  std::string out_path;  // empty writes to stdout

  QuadraticModel build_model() const;
  std::vector<double> sweep_times() const;
  void validate() const;
};

ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_file(const std::string& path);
std::string render_config(const ScenarioConfig& cfg);

/// Built-in scenarios: "ak-closed" and "ak-ohmic". Throws UnknownPreset.
ScenarioConfig preset(const std::string& name);

struct ReportRow {
  double t = 0.0;
  bool exists = false;
  double cond = 0.0;
  double delta_x2 = 0.0;
  double delta_p2 = 0.0;
  double delta_xp = 0.0;
  double delta_x2_pointer = 0.0;
  double delta_x2_bath = 0.0;
  double s_x = 0.0;
  double s_p = 0.0;
  double s_total = 0.0;
  double lambda_opt = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  double route_disagreement = 0.0;
  bool violation = false;
};

struct RunSummary {
  std::vector<ReportRow> rows;
  int violations = 0;
  int skipped = 0;  // rows without invertible inference
  double max_step_defect = 0.0;
};

/// Element-wise relative disagreement between two covariance totals, with a
/// floor of 1e-3 of the largest element so near-zero entries stay comparable.
double route_disagreement(const NoiseCovariance& a, const NoiseCovariance& b);

RunSummary run_scenario(const ScenarioConfig& cfg);

void write_csv(std::ostream& out, const RunSummary& summary);

}  // namespace pbm
