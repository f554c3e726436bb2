#include "pbm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace pbm {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& tok, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad number '" + tok + "' for key " + key);
  }
}

bool parse_bool(const std::string& tok, const std::string& key) {
  if (tok == "true" || tok == "1") return true;
  if (tok == "false" || tok == "0") return false;
  throw ParseError("bad boolean '" + tok + "' for key " + key);
}

Mass parse_mass(const std::string& tok, const std::string& key) {
  if (tok == "inf") return Mass::infinite();
  return Mass::finite(parse_number(tok, key));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

// Piecewise-constant scalar: either a plain number or "v0 @ 0, v1 @ t1, ...".
Piecewise<double> parse_piecewise(const std::string& tok, const std::string& key) {
  if (tok.find('@') == std::string::npos)
    return Piecewise<double>::constant(parse_number(tok, key));
  std::vector<double> starts, values;
  for (const std::string& part : split(tok, ',')) {
    const auto at = part.find('@');
    if (at == std::string::npos) throw ParseError("piecewise segment needs 'value @ time': " + key);
    values.push_back(parse_number(trim(part.substr(0, at)), key));
    starts.push_back(parse_number(trim(part.substr(at + 1)), key));
  }
  try {
    return Piecewise<double>(std::move(starts), std::move(values));
  } catch (const ValidationError& e) {
    throw ParseError(std::string(e.what()) + " for key " + key);
  }
}

std::string render_piecewise(const Piecewise<double>& p) {
  if (p.segments() == 1) {
    std::ostringstream out;
    out.precision(17);
    out << p.values()[0];
    return out.str();
  }
  std::ostringstream out;
  out.precision(17);
  for (std::size_t k = 0; k < p.segments(); ++k) {
    if (k) out << ", ";
    out << p.values()[k] << " @ " << p.starts()[k];
  }
  return out.str();
}

CouplingMatrix parse_coupling(const std::string& tok, const std::string& key) {
  const auto rows = split(tok, ';');
  if (rows.size() != 2) throw ParseError("coupling needs two rows separated by ';'");
  CouplingMatrix c;
  for (int r = 0; r < 2; ++r) {
    std::istringstream in(rows[r]);
    std::string num;
    int col = 0;
    while (in >> num) {
      if (col >= 4) throw ParseError("coupling row has more than four entries");
      c(r, col++) = parse_number(num, key);
    }
    if (col != 4) throw ParseError("coupling row needs four entries");
  }
  return c;
}

using KeyMap = std::map<std::string, std::string>;
using BlockMap = std::map<std::string, KeyMap>;

BlockMap read_blocks(std::istream& in) {
  BlockMap blocks;
  std::string line, block;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("bad block header at line " + std::to_string(lineno));
      block = trim(line.substr(1, line.size() - 2));
      blocks.try_emplace(block);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || block.empty())
      throw ParseError("expected 'key = value' at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError("empty key or value at line " + std::to_string(lineno));
    if (!blocks[block].emplace(key, value).second)
      throw ParseError("duplicate key '" + key + "' in block [" + block + "]");
  }
  return blocks;
}

// Pulls a key out of the map so leftovers can be reported as unknown.
std::optional<std::string> take(KeyMap& keys, const std::string& key) {
  const auto it = keys.find(key);
  if (it == keys.end()) return std::nullopt;
  std::string v = it->second;
  keys.erase(it);
  return v;
}

void reject_unknown(const KeyMap& keys, const std::string& block) {
  if (!keys.empty())
    throw ParseError("unknown key '" + keys.begin()->first + "' in block [" + block + "]");
}

}  // namespace

QuadraticModel ScenarioConfig::build_model() const {
  QuadraticModel m;
  m.mass_s = mass_s;
  m.mass_1 = mass_1;
  m.mass_2 = mass_2;
  m.c_s = c_s;
  m.c_1 = c_1;
  m.c_2 = c_2;
  if (ak_kappa && coupling)
    throw ParseError("ak_kappa and coupling are mutually exclusive");
  if (ak_kappa) {
    CouplingMatrix c = CouplingMatrix::Zero();
    c(0, 2) = *ak_kappa;
    c(1, 3) = *ak_kappa;
    m.coupling = Piecewise<CouplingMatrix>::constant(c);
  } else if (coupling) {
    m.coupling = Piecewise<CouplingMatrix>::constant(*coupling);
  }
  if (family == BathFamily::none) {
    m.bath = ContinuousBath{OhmicExponential{0.0, omega_c}, beta, 0,
                            Piecewise<double>::constant(1.0), {true, true, true}};
  } else {
    m.bath = ContinuousBath{OhmicExponential{gamma, omega_c}, beta, modes, switch_fn, pattern};
  }
  return m;
}

std::vector<double> ScenarioConfig::sweep_times() const {
  std::vector<double> out(sweep_steps);
  for (int k = 0; k < sweep_steps; ++k)
    out[k] = sweep_steps == 1
                 ? t_start
                 : t_start + (t_stop - t_start) * k / (sweep_steps - 1);
  return out;
}

void ScenarioConfig::validate() const {
  if (!(t_start > 0.0) || !(t_stop >= t_start))
    throw ValidationError("sweep: need 0 < t_start <= t_stop");
  if (sweep_steps < 1) throw ValidationError("sweep: steps must be >= 1");
  if (grid_points < 16) throw ValidationError("numerics: grid_points too small");
  if (time_steps < 4) throw ValidationError("numerics: time_steps too small");
  pointers.validate();
  validate_state(system);
  build_model().validate();
}

ScenarioConfig parse_config(std::istream& in) {
  BlockMap blocks = read_blocks(in);
  ScenarioConfig cfg;

  for (const auto& [name, _] : blocks) {
    if (name != "model" && name != "bath" && name != "pointers" && name != "system" &&
        name != "measurement" && name != "sweep" && name != "numerics" && name != "output")
      throw ParseError("unknown block [" + name + "]");
  }

  if (blocks.count("model")) {
    KeyMap& b = blocks["model"];
    if (auto v = take(b, "mass_s")) cfg.mass_s = parse_mass(*v, "mass_s");
    if (auto v = take(b, "mass_1")) cfg.mass_1 = parse_mass(*v, "mass_1");
    if (auto v = take(b, "mass_2")) cfg.mass_2 = parse_mass(*v, "mass_2");
    if (auto v = take(b, "c_s")) cfg.c_s = parse_piecewise(*v, "c_s");
    if (auto v = take(b, "c_1")) cfg.c_1 = parse_piecewise(*v, "c_1");
    if (auto v = take(b, "c_2")) cfg.c_2 = parse_piecewise(*v, "c_2");
    if (auto v = take(b, "ak_kappa")) cfg.ak_kappa = parse_number(*v, "ak_kappa");
    if (auto v = take(b, "coupling")) cfg.coupling = parse_coupling(*v, "coupling");
    reject_unknown(b, "model");
  }

  if (blocks.count("bath")) {
    KeyMap& b = blocks["bath"];
    if (auto v = take(b, "family")) {
      if (*v == "none")
        cfg.family = BathFamily::none;
      else if (*v == "ohmic")
        cfg.family = BathFamily::ohmic;
      else
        throw ParseError("unknown bath family '" + *v + "'");
    }
    if (auto v = take(b, "gamma")) cfg.gamma = parse_number(*v, "gamma");
    if (auto v = take(b, "omega_c")) cfg.omega_c = parse_number(*v, "omega_c");
    if (auto v = take(b, "modes")) cfg.modes = static_cast<int>(parse_number(*v, "modes"));
    if (auto v = take(b, "beta")) cfg.beta = parse_number(*v, "beta");
    if (auto v = take(b, "pattern")) {
      std::istringstream ps(*v);
      int flag = 0;
      for (int a = 0; a < 3; ++a) {
        if (!(ps >> flag) || (flag != 0 && flag != 1))
          throw ParseError("pattern needs three 0/1 flags");
        cfg.pattern[a] = flag == 1;
      }
    }
    if (auto v = take(b, "switch")) cfg.switch_fn = parse_piecewise(*v, "switch");
    reject_unknown(b, "bath");
  }

  if (blocks.count("pointers")) {
    KeyMap& b = blocks["pointers"];
    if (auto v = take(b, "sigma1_sq")) cfg.pointers.var1 = parse_number(*v, "sigma1_sq");
    if (auto v = take(b, "sigma2_sq")) cfg.pointers.var2 = parse_number(*v, "sigma2_sq");
    reject_unknown(b, "pointers");
  }

  if (blocks.count("system")) {
    KeyMap& b = blocks["system"];
    std::string type = take(b, "type").value_or("gaussian");
    if (type == "gaussian") {
      GaussianState g;
      if (auto v = take(b, "mean_x")) g.mean_x = parse_number(*v, "mean_x");
      if (auto v = take(b, "mean_p")) g.mean_p = parse_number(*v, "mean_p");
      if (auto v = take(b, "var_x")) g.var_x = parse_number(*v, "var_x");
      if (auto v = take(b, "var_p")) g.var_p = parse_number(*v, "var_p");
      if (auto v = take(b, "cov_xp")) g.cov_xp = parse_number(*v, "cov_xp");
      if (auto v = take(b, "pure")) g.pure = parse_bool(*v, "pure");
      cfg.system = g;
    } else if (type == "tabulated") {
      const auto pf = take(b, "position_file");
      const auto mf = take(b, "momentum_file");
      if (!pf || !mf)
        throw ParseError("tabulated system needs position_file and momentum_file");
      TabulatedState tab;
      tab.position = read_density(*pf, Axis::position);
      tab.momentum = read_density(*mf, Axis::momentum);
      cfg.system = tab;
      cfg.position_file = *pf;
      cfg.momentum_file = *mf;
    } else {
      throw ParseError("unknown system type '" + type + "'");
    }
    reject_unknown(b, "system");
  }

  if (blocks.count("measurement")) {
    KeyMap& b = blocks["measurement"];
    if (auto v = take(b, "observables")) {
      if (*v == "x1 x2")
        cfg.choice = MeasurementChoice::x1_x2;
      else if (*v == "x1 p2")
        cfg.choice = MeasurementChoice::x1_p2;
      else if (*v == "p1 x2")
        cfg.choice = MeasurementChoice::p1_x2;
      else if (*v == "p1 p2")
        cfg.choice = MeasurementChoice::p1_p2;
      else
        throw ParseError("unknown observables '" + *v + "'");
    }
    reject_unknown(b, "measurement");
  }

  if (blocks.count("sweep")) {
    KeyMap& b = blocks["sweep"];
    if (auto v = take(b, "t_start")) cfg.t_start = parse_number(*v, "t_start");
    if (auto v = take(b, "t_stop")) cfg.t_stop = parse_number(*v, "t_stop");
    if (auto v = take(b, "steps")) cfg.sweep_steps = static_cast<int>(parse_number(*v, "steps"));
    reject_unknown(b, "sweep");
  }

  if (blocks.count("numerics")) {
    KeyMap& b = blocks["numerics"];
    if (auto v = take(b, "grid_points"))
      cfg.grid_points = static_cast<int>(parse_number(*v, "grid_points"));
    if (auto v = take(b, "time_steps"))
      cfg.time_steps = static_cast<int>(parse_number(*v, "time_steps"));
    if (auto v = take(b, "check_grid")) cfg.check_grid = parse_bool(*v, "check_grid");
    reject_unknown(b, "numerics");
  }

  if (blocks.count("output")) {
    KeyMap& b = blocks["output"];
    if (auto v = take(b, "path")) cfg.out_path = *v;
    reject_unknown(b, "output");
  }

  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  return parse_config(in);
}

std::string render_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  auto mass_str = [](const Mass& m) {
    if (m.is_infinite) return std::string("inf");
    std::ostringstream s;
    s.precision(17);
    s << m.value;
    return s.str();
  };

  out << "[model]\n";
  out << "mass_s = " << mass_str(cfg.mass_s) << "\n";
  out << "mass_1 = " << mass_str(cfg.mass_1) << "\n";
  out << "mass_2 = " << mass_str(cfg.mass_2) << "\n";
  out << "c_s = " << render_piecewise(cfg.c_s) << "\n";
  out << "c_1 = " << render_piecewise(cfg.c_1) << "\n";
  out << "c_2 = " << render_piecewise(cfg.c_2) << "\n";
  if (cfg.ak_kappa) out << "ak_kappa = " << *cfg.ak_kappa << "\n";
  if (cfg.coupling) {
    out << "coupling = ";
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 4; ++c) out << (*cfg.coupling)(r, c) << (c < 3 ? " " : "");
      out << (r == 0 ? " ; " : "\n");
    }
  }

  out << "\n[bath]\n";
  out << "family = " << (cfg.family == BathFamily::none ? "none" : "ohmic") << "\n";
  if (cfg.family == BathFamily::ohmic) {
    out << "gamma = " << cfg.gamma << "\n";
    out << "omega_c = " << cfg.omega_c << "\n";
    out << "modes = " << cfg.modes << "\n";
    out << "pattern = " << cfg.pattern[0] << " " << cfg.pattern[1] << " " << cfg.pattern[2]
        << "\n";
    out << "switch = " << render_piecewise(cfg.switch_fn) << "\n";
  }
  out << "beta = " << cfg.beta << "\n";

  out << "\n[pointers]\n";
  out << "sigma1_sq = " << cfg.pointers.var1 << "\n";
  out << "sigma2_sq = " << cfg.pointers.var2 << "\n";

  out << "\n[system]\n";
  if (const auto* g = std::get_if<GaussianState>(&cfg.system)) {
    out << "type = gaussian\n";
    out << "mean_x = " << g->mean_x << "\n";
    out << "mean_p = " << g->mean_p << "\n";
    out << "var_x = " << g->var_x << "\n";
    out << "var_p = " << g->var_p << "\n";
    out << "cov_xp = " << g->cov_xp << "\n";
    out << "pure = " << (g->pure ? "true" : "false") << "\n";
  } else {
    out << "type = tabulated\n";
    out << "position_file = " << cfg.position_file.value_or("position.dat") << "\n";
    out << "momentum_file = " << cfg.momentum_file.value_or("momentum.dat") << "\n";
  }

  out << "\n[measurement]\n";
  out << "observables = " << measurement_name(cfg.choice) << "\n";

  out << "\n[sweep]\n";
  out << "t_start = " << cfg.t_start << "\n";
  out << "t_stop = " << cfg.t_stop << "\n";
  out << "steps = " << cfg.sweep_steps << "\n";

  out << "\n[numerics]\n";
  out << "grid_points = " << cfg.grid_points << "\n";
  out << "time_steps = " << cfg.time_steps << "\n";
  out << "check_grid = " << (cfg.check_grid ? "true" : "false") << "\n";

  out << "\n[output]\n";
  if (!cfg.out_path.empty()) out << "path = " << cfg.out_path << "\n";
  return out.str();
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig cfg;
  cfg.mass_s = Mass::infinite();
  cfg.mass_1 = Mass::infinite();
  cfg.mass_2 = Mass::infinite();
  cfg.ak_kappa = 1.0;
  cfg.pointers = PointerPreparation{0.25, 0.25};
  cfg.system = GaussianState{0.0, 0.0, 0.5, 0.5, 0.0, true};
  cfg.choice = MeasurementChoice::x1_x2;
  cfg.t_start = 0.1;
  cfg.t_stop = 2.0;
  cfg.sweep_steps = 20;
  if (name == "ak-closed") {
    cfg.family = BathFamily::none;
    return cfg;
  }
  if (name == "ak-ohmic") {
    cfg.family = BathFamily::ohmic;
    cfg.gamma = 0.05;
    cfg.omega_c = 5.0;
    cfg.modes = 64;
    cfg.beta = 1.0;
    cfg.pattern = {true, true, true};
    return cfg;
  }
  throw UnknownPreset("unknown preset '" + name + "'");
}

double route_disagreement(const NoiseCovariance& a, const NoiseCovariance& b) {
  const Eigen::Matrix2d ta = a.total();
  const Eigen::Matrix2d tb = b.total();
  const double scale = std::max({ta.cwiseAbs().maxCoeff(), tb.cwiseAbs().maxCoeff(), 1e-30});
  double rel = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const double denom = std::max({std::abs(ta(r, c)), std::abs(tb(r, c)), 1e-3 * scale});
      rel = std::max(rel, std::abs(ta(r, c) - tb(r, c)) / denom);
    }
  return rel;
}

RunSummary run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const QuadraticModel model = cfg.build_model();
  const DiscreteBath bath = discretize_bath(model.bath);
  const double beta = bath_beta(model.bath);
  const std::vector<double> sweep = cfg.sweep_times();

  // Master grid: breakpoints and sweep times as anchors, each gap filled
  // uniformly at roughly t_stop / time_steps spacing.
  std::vector<double> anchors = model.breakpoints(cfg.t_stop);
  anchors.insert(anchors.end(), sweep.begin(), sweep.end());
  anchors.push_back(0.0);
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
  const double target = cfg.t_stop / cfg.time_steps;
  std::vector<double> grid;
  for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
    const double lo = anchors[a], hi = anchors[a + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / target - 1e-12)));
    for (int k = 0; k < n; ++k) grid.push_back(lo + (hi - lo) * k / n);
  }
  grid.push_back(anchors.back());

  const Propagator prop = propagate(model, bath, grid);

  RunSummary summary;
  summary.max_step_defect = prop.max_step_defect();

  for (double t : sweep) {
    ReportRow row;
    row.t = t;
    const InferenceCoefficients coeff = inference_coefficients(prop, cfg.choice, t);
    row.cond = coeff.condition;
    row.exists = coeff.exists;
    if (!coeff.exists) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.delta_x2 = row.delta_p2 = row.delta_xp = nan;
      row.delta_x2_pointer = row.delta_x2_bath = nan;
      row.s_x = row.s_p = row.s_total = row.lambda_opt = row.bound = row.gap = nan;
      row.route_disagreement = nan;
      ++summary.skipped;
      summary.rows.push_back(row);
      continue;
    }

    const NoiseCovariance direct =
        noise_covariance(prop, coeff, cfg.pointers, bath, beta, t, CovarianceRoute::direct);
    const NoiseCovariance kernel = noise_covariance(prop, coeff, cfg.pointers, bath, beta, t,
                                                    CovarianceRoute::kernel, cfg.check_grid);
    row.route_disagreement = route_disagreement(direct, kernel);

    row.delta_x2 = direct.delta_x2;
    row.delta_p2 = direct.delta_p2;
    row.delta_xp = direct.delta_xp;
    row.delta_x2_pointer = direct.pointer(0, 0);
    row.delta_x2_bath = direct.bath(0, 0);

    const NoiseBoundReport bound_report = check_noise_bound(direct);

    const Density marginal_x = broadened_marginal(cfg.system, direct.delta_x2, Axis::position,
                                                  std::nullopt, cfg.grid_points);
    const Density marginal_p = broadened_marginal(cfg.system, direct.delta_p2, Axis::momentum,
                                                  std::nullopt, cfg.grid_points);
    const EntropyReport entropy = collective_entropy(marginal_x, marginal_p, direct);

    row.s_x = entropy.s_x;
    row.s_p = entropy.s_p;
    row.s_total = entropy.s_total;
    row.lambda_opt = entropy.lambda_opt;
    row.bound = entropy.bound;
    row.gap = entropy.gap;
    row.violation =
        entropy.gap < -1e-6 || !bound_report.robertson_ok || !bound_report.schroedinger_ok;
    if (row.violation) ++summary.violations;
    summary.rows.push_back(row);
  }
  return summary;
}

void write_csv(std::ostream& out, const RunSummary& summary) {
  out << "t,exists,cond,delta_x2,delta_p2,delta_xp,delta_x2_pointer,delta_x2_bath,"
         "s_x,s_p,s_total,lambda_opt,bound,gap,route_disagreement\n";
  out.precision(17);
  for (const ReportRow& r : summary.rows) {
    out << r.t << ',' << (r.exists ? 1 : 0) << ',' << r.cond << ',' << r.delta_x2 << ','
        << r.delta_p2 << ',' << r.delta_xp << ',' << r.delta_x2_pointer << ','
        << r.delta_x2_bath << ',' << r.s_x << ',' << r.s_p << ',' << r.s_total << ','
        << r.lambda_opt << ',' << r.bound << ',' << r.gap << ',' << r.route_disagreement
        << '\n';
  }
}

}  // namespace pbm
