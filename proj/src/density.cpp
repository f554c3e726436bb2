#include "pbm/density.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pbm/kernels.hpp"

namespace pbm {

namespace {

// Trapezoidal integral of f over the grid: spacing * (sum - half the ends).
double trapezoid(const std::vector<double>& f, double spacing) {
  if (f.size() < 2) return 0.0;
  const double s = kernels::sum(f.data(), f.size());
  return spacing * (s - 0.5 * (f.front() + f.back()));
}

}  // namespace

double GridDensity::mass() const { return trapezoid(values, spacing); }

double GridDensity::mean() const {
  std::vector<double> xf(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) xf[i] = coord(i) * values[i];
  return trapezoid(xf, spacing) / mass();
}

double GridDensity::variance() const {
  const double mu = mean();
  std::vector<double> x2f(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = coord(i) - mu;
    x2f[i] = d * d * values[i];
  }
  return trapezoid(x2f, spacing) / mass();
}

void GridDensity::validate(double tol) const {
  if (values.size() < 2) throw ValidationError("grid density: need at least two samples");
  if (!(spacing > 0.0) || !std::isfinite(spacing) || !std::isfinite(origin))
    throw ValidationError("grid density: bad grid");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError("grid density: values must be finite and non-negative");
  const double m = mass();
  if (std::abs(m - 1.0) > tol)
    throw ValidationError("grid density: mass " + std::to_string(m) + " not within tolerance of 1");
}

void GridDensity::normalize() {
  const double m = mass();
  if (!(m > 0.0)) throw ValidationError("grid density: cannot normalize zero mass");
  for (double& v : values) v /= m;
}

GridDensity GaussianDensity::tabulate(double origin, double spacing, std::size_t count) const {
  GridDensity out;
  out.origin = origin;
  out.spacing = spacing;
  out.axis = axis;
  out.values.resize(count);
  // exp(-(origin + i h - mean)^2 / (2 var)) expanded as a quadratic in i
  const double a = origin - mean;
  const double q = -1.0 / (2.0 * variance);
  const double c0 = q * a * a;
  const double c1 = q * 2.0 * a * spacing;
  const double c2 = q * spacing * spacing;
  kernels::exp_quadratic(out.values.data(), count, c0, c1, c2);
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * variance);
  for (double& v : out.values) v *= norm;
  return out;
}

GridDensity GaussianDensity::tabulate_auto(std::size_t count, double half_width) const {
  const double sigma = std::sqrt(variance);
  const double origin = mean - half_width * sigma;
  const double spacing = 2.0 * half_width * sigma / static_cast<double>(count - 1);
  return tabulate(origin, spacing, count);
}

double density_mean(const Density& d) {
  return std::visit([](const auto& v) -> double {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, GaussianDensity>)
      return v.mean;
    else
      return v.mean();
  }, d);
}

double density_variance(const Density& d) {
  return std::visit([](const auto& v) -> double {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, GaussianDensity>)
      return v.variance;
    else
      return v.variance();
  }, d);
}

Axis density_axis(const Density& d) {
  return std::visit([](const auto& v) { return v.axis; }, d);
}

GridDensity read_density(const std::string& path, Axis axis) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open density file: " + path);
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x, v;
    if (!(ls >> x >> v)) throw ValidationError("bad line in density file: " + path);
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 2) throw ValidationError("density file needs at least two rows: " + path);
  const double h = xs[1] - xs[0];
  if (!(h > 0.0)) throw ValidationError("density grid must be increasing: " + path);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw ValidationError("density grid must be uniform: " + path);
  }
  GridDensity out;
  out.origin = xs.front();
  out.spacing = h;
  out.values = std::move(vs);
  out.axis = axis;
  return out;
}

void write_density(const std::string& path, const GridDensity& d) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write density file: " + path);
  out.precision(17);
  for (std::size_t i = 0; i < d.count(); ++i)
    out << d.coord(i) << ' ' << d.values[i] << '\n';
}

}  // namespace pbm
