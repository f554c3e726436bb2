#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pbm/errors.hpp"

namespace pbm {

enum class Axis { position, momentum };

/// Probability density sampled on a uniform grid; integrals are trapezoidal.
struct GridDensity {
  double origin = 0.0;
  double spacing = 1.0;
  std::vector<double> values;
  Axis axis = Axis::position;

  std::size_t count() const { return values.size(); }
  double coord(std::size_t i) const { return origin + spacing * static_cast<double>(i); }

  double mass() const;
  double mean() const;
  double variance() const;

  /// Throws ValidationError unless values are non-negative and the
  /// trapezoidal mass is within `tol` of one.
  void validate(double tol = 1e-6) const;

  /// Rescales values so the trapezoidal mass is exactly one.
  void normalize();
};

/// Normal density in closed form, used wherever Gaussian states stay exact.
struct GaussianDensity {
  double mean = 0.0;
  double variance = 1.0;
  Axis axis = Axis::position;

  GridDensity tabulate(double origin, double spacing, std::size_t count) const;
  /// Grid spanning mean +/- half_width standard deviations.
  GridDensity tabulate_auto(std::size_t count, double half_width = 8.0) const;
};

using Density = std::variant<GaussianDensity, GridDensity>;

double density_mean(const Density& d);
double density_variance(const Density& d);
Axis density_axis(const Density& d);

/// Two-column text (coordinate, density). The grid must be uniform.
GridDensity read_density(const std::string& path, Axis axis);
void write_density(const std::string& path, const GridDensity& d);

}  // namespace pbm
