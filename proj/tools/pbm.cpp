#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "pbm/kernels.hpp"
#include "pbm/scenario.hpp"

namespace {

int run_simulate(const std::string& config_path, const std::string& out_override,
                 int grid_points_override) {
  pbm::ScenarioConfig cfg = pbm::parse_config_file(config_path);
  if (grid_points_override > 0) cfg.grid_points = grid_points_override;
  if (!out_override.empty()) cfg.out_path = out_override;

  const pbm::RunSummary summary = pbm::run_scenario(cfg);

  if (cfg.out_path.empty()) {
    pbm::write_csv(std::cout, summary);
  } else {
    std::ofstream out(cfg.out_path);
    if (!out) throw pbm::Error("cannot write output file: " + cfg.out_path);
    pbm::write_csv(out, summary);
  }

  std::cerr << "rows: " << summary.rows.size() << "  skipped (not invertible): "
            << summary.skipped << "  bound violations: " << summary.violations
            << "  max step symplectic defect: " << summary.max_step_defect
            << "  kernel isa: " << pbm::kernels::isa_name(pbm::kernels::active_isa()) << "\n";
  if (summary.skipped > 0 && summary.violations == 0)
    std::cerr << "warning: " << summary.skipped
              << " sweep time(s) had no invertible inference and were flagged\n";
  return summary.violations > 0 ? 1 : 0;
}

int run_preset(const std::string& name, const std::string& write_path) {
  const pbm::ScenarioConfig cfg = pbm::preset(name);
  const std::string text = pbm::render_config(cfg);
  if (write_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(write_path);
    if (!out) throw pbm::Error("cannot write config file: " + write_path);
    out << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open pointer-based simultaneous measurement simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  int grid_points = 0;
  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario and write CSV");
  simulate->add_option("--config", config_path, "scenario configuration file")->required();
  simulate->add_option("--out", out_path, "CSV output path (default: stdout or [output] path)");
  simulate->add_option("--grid-points", grid_points, "override the marginal grid resolution");

  std::string preset_name, write_path;
  CLI::App* preset_cmd = app.add_subcommand("preset", "print or write a built-in scenario");
  preset_cmd->add_option("--name", preset_name, "preset name (ak-closed, ak-ohmic)")->required();
  preset_cmd->add_option("--write", write_path, "write the config to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(config_path, out_path, grid_points);
    return run_preset(preset_name, write_path);
  } catch (const pbm::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pbm::UnknownPreset& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pbm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
