#include <cmath>

#include "pbm/kernels.hpp"

namespace pbm::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double plogp_scalar(const double* p, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] >= 1e-300) acc += p[i] * std::log(p[i]);
  }
  return acc;
}

void exp_quadratic_scalar(double* out, std::size_t n, double c0, double c1, double c2) {
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    out[i] = std::exp(c0 + x * (c1 + x * c2));
  }
}

}  // namespace

namespace detail {
const Ops scalar_ops = {dot_scalar, sum_scalar, plogp_scalar, exp_quadratic_scalar};
}

}  // namespace pbm::kernels
