#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pbm/kernels.hpp"

using namespace pbm;

namespace {

std::vector<double> random_vector(std::mt19937& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

struct IsaGuard {
  kernels::Isa saved;
  IsaGuard() : saved(kernels::active_isa()) {}
  ~IsaGuard() { kernels::force_isa(saved); }
};

}  // namespace

TEST_CASE("scalar reference values") {
  IsaGuard guard;
  kernels::force_isa(kernels::Isa::scalar);

  const std::vector<double> a = {1.0, 2.0, 3.0};
  const std::vector<double> b = {4.0, 5.0, 6.0};
  CHECK(kernels::dot(a.data(), b.data(), 3) == doctest::Approx(32.0).epsilon(1e-15));
  CHECK(kernels::sum(a.data(), 3) == doctest::Approx(6.0).epsilon(1e-15));

  // p ln p with a zero entry contributing nothing
  const std::vector<double> p = {0.5, 0.0, 2.0};
  CHECK(kernels::plogp_sum(p.data(), 3) ==
        doctest::Approx(0.5 * std::log(0.5) + 2.0 * std::log(2.0)).epsilon(1e-15));

  std::vector<double> e(5);
  kernels::exp_quadratic(e.data(), 5, -1.0, 0.5, -0.25);
  for (std::size_t i = 0; i < 5; ++i) {
    const double x = static_cast<double>(i);
    CHECK(e[i] == doctest::Approx(std::exp(-1.0 + 0.5 * x - 0.25 * x * x)).epsilon(1e-15));
  }
}

TEST_CASE("avx2 path matches the scalar reference") {
  if (!kernels::avx2_available()) return;
  IsaGuard guard;

  std::mt19937 rng(42);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 16u, 17u, 1000u, 4096u}) {
    const auto a = random_vector(rng, n, -2.0, 2.0);
    const auto b = random_vector(rng, n, -2.0, 2.0);
    auto p = random_vector(rng, n, 0.0, 3.0);
    if (n > 2) p[n / 2] = 0.0;  // exercise the dead-lane mask

    kernels::force_isa(kernels::Isa::scalar);
    const double dot_ref = kernels::dot(a.data(), b.data(), n);
    const double sum_ref = kernels::sum(a.data(), n);
    const double plogp_ref = kernels::plogp_sum(p.data(), n);

    kernels::force_isa(kernels::Isa::avx2);
    CHECK(kernels::dot(a.data(), b.data(), n) ==
          doctest::Approx(dot_ref).epsilon(1e-12).scale(std::max(1.0, std::abs(dot_ref))));
    CHECK(kernels::sum(a.data(), n) ==
          doctest::Approx(sum_ref).epsilon(1e-12).scale(std::max(1.0, std::abs(sum_ref))));
    CHECK(kernels::plogp_sum(p.data(), n) ==
          doctest::Approx(plogp_ref).epsilon(1e-12).scale(std::max(1.0, std::abs(plogp_ref))));
  }
}

TEST_CASE("vector exp matches std::exp across the working range") {
  if (!kernels::avx2_available()) return;
  IsaGuard guard;
  kernels::force_isa(kernels::Isa::avx2);

  // c0 + c1 i + c2 i^2 sweeps from 50 down through deep negative territory
  std::vector<double> got(2048);
  const double c0 = 50.0, c1 = -0.37, c2 = -0.0004;
  kernels::exp_quadratic(got.data(), got.size(), c0, c1, c2);
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double x = static_cast<double>(i);
    const double want = std::exp(c0 + x * (c1 + x * c2));
    if (want == 0.0) {
      CHECK(got[i] == 0.0);
    } else {
      CHECK(got[i] == doctest::Approx(want).epsilon(5e-14));
    }
  }
}

TEST_CASE("flush-to-zero below the exp underflow cut") {
  if (!kernels::avx2_available()) return;
  IsaGuard guard;
  kernels::force_isa(kernels::Isa::avx2);
  std::vector<double> got(4);
  kernels::exp_quadratic(got.data(), 4, -800.0, -1.0, 0.0);
  for (double v : got) CHECK(v == 0.0);
}

TEST_CASE("isa dispatch reports a valid path") {
  const kernels::Isa isa = kernels::active_isa();
  CHECK((isa == kernels::Isa::scalar || isa == kernels::Isa::avx2));
  if (!kernels::avx2_available()) CHECK(isa == kernels::Isa::scalar);
  CHECK(kernels::isa_name(isa) != nullptr);
}
