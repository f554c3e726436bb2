#include "pbm/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace pbm::kernels {
namespace {

const detail::Ops* select_initial() {
  if (const char* env = std::getenv("PBM_KERNEL_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return &detail::scalar_ops;
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) return &detail::avx2_ops;
  }
  return avx2_available() ? &detail::avx2_ops : &detail::scalar_ops;
}

const detail::Ops*& current() {
  static const detail::Ops* ops = select_initial();
  return ops;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() {
  return current() == &detail::avx2_ops ? Isa::avx2 : Isa::scalar;
}

void force_isa(Isa isa) {
  current() = (isa == Isa::avx2 && avx2_available()) ? &detail::avx2_ops
                                                     : &detail::scalar_ops;
}

const char* isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, std::size_t n) {
  return current()->dot(a, b, n);
}

double sum(const double* a, std::size_t n) { return current()->sum(a, n); }

double plogp_sum(const double* p, std::size_t n) {
  return current()->plogp_sum(p, n);
}

void exp_quadratic(double* out, std::size_t n, double c0, double c1, double c2) {
  current()->exp_quadratic(out, n, c0, c1, c2);
}

}  // namespace pbm::kernels
