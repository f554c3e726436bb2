#pragma once

#include <cstddef>

// Grid arithmetic used by the quadrature, convolution and tabulation paths.
// Every function has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant selected once at startup. The variants are equivalence
// tested against the reference; set PBM_KERNEL_ISA=scalar (or force_isa)
// to pin the reference path.
namespace pbm::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
void force_isa(Isa isa);
const char* isa_name(Isa isa);
bool avx2_available();

/// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

/// sum_i a[i]
double sum(const double* a, std::size_t n);

/// sum_i a[i] * ln(a[i]); entries below 1e-300 contribute zero.
double plogp_sum(const double* p, std::size_t n);

/// out[i] = exp(c0 + c1*i + c2*i*i) for i = 0..n-1.
void exp_quadratic(double* out, std::size_t n, double c0, double c1, double c2);

namespace detail {
struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*plogp_sum)(const double*, std::size_t);
  void (*exp_quadratic)(double*, std::size_t, double, double, double);
};
extern const Ops scalar_ops;
extern const Ops avx2_ops;
}  // namespace detail

}  // namespace pbm::kernels
