#include "pbm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace pbm::kernels {
namespace {

// exp with Cody-Waite reduction and the classic rational approximant on
// |r| <= ln2/2. Lanes below -708.39 flush to zero, above 709 saturate to
// +inf; both limits are outside anything the grid paths produce.
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d red_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d red_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d lo_cut = _mm256_set1_pd(-708.39641853226408);
  const __m256d hi_cut = _mm256_set1_pd(709.0);

  const __m256d zero_mask = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
  const __m256d inf_mask = _mm256_cmp_pd(x, hi_cut, _CMP_GT_OQ);
  x = _mm256_max_pd(_mm256_min_pd(x, hi_cut), lo_cut);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, red_hi, x);
  r = _mm256_fnmadd_pd(n, red_lo, r);
  const __m256d z = _mm256_mul_pd(r, r);

  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, r);

  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, z, two);

  __m256d e = _mm256_add_pd(one, _mm256_div_pd(_mm256_mul_pd(two, p), _mm256_sub_pd(q, p)));

  // scale by 2^n through the exponent field; n stays within [-1022, 1023]
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));

  e = _mm256_andnot_pd(zero_mask, e);
  e = _mm256_blendv_pd(e, _mm256_set1_pd(HUGE_VAL), inf_mask);
  return e;
}

// log for normal positive inputs: mantissa reduced to [sqrt(1/2), sqrt(2)),
// atanh series in t = (m-1)/(m+1), exponent folded back with a split ln2.
inline __m256d log_pd(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sqrt2 = _mm256_set1_pd(1.41421356237309504880);

  const __m256i ibits = _mm256_castpd_si256(x);
  const __m256i efield = _mm256_srli_epi64(ibits, 52);
  __m256i e64 = _mm256_sub_epi64(efield, _mm256_set1_epi64x(1023));

  const __m256i mant = _mm256_or_si256(
      _mm256_and_si256(ibits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
      _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant);

  const __m256d halve = _mm256_cmp_pd(m, sqrt2, _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), halve);
  e64 = _mm256_add_epi64(e64, _mm256_and_si256(_mm256_castpd_si256(halve),
                                               _mm256_set1_epi64x(1)));

  const __m256i pack = _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0);
  const __m128i e32 = _mm256_castsi256_si128(_mm256_permutevar8x32_epi32(e64, pack));
  const __m256d e = _mm256_cvtepi32_pd(e32);

  const __m256d t = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d u = _mm256_mul_pd(t, t);

  __m256d s = _mm256_set1_pd(1.0 / 19.0);
  s = _mm256_fmadd_pd(s, u, _mm256_set1_pd(1.0 / 17.0));
  s = _mm256_fmadd_pd(s, u, _mm256_set1_pd(1.0 / 15.0));
  s = _mm256_fmadd_pd(s, u, _mm256_set1_pd(1.0 / 13.0));
  s = _mm256_fmadd_pd(s, u, _mm256_set1_pd(1.0 / 11.0));
  s = _mm256_fmadd_pd(s, u, _mm256_set1_pd(1.0 / 9.0));
  s = _mm256_fmadd_pd(s, u, _mm256_set1_pd(1.0 / 7.0));
  s = _mm256_fmadd_pd(s, u, _mm256_set1_pd(1.0 / 5.0));
  s = _mm256_fmadd_pd(s, u, _mm256_set1_pd(1.0 / 3.0));
  s = _mm256_mul_pd(s, u);

  const __m256d t2 = _mm256_add_pd(t, t);
  const __m256d logm = _mm256_fmadd_pd(t2, s, t2);

  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  __m256d res = _mm256_fmadd_pd(e, ln2_lo, logm);
  res = _mm256_fmadd_pd(e, ln2_hi, res);
  return res;
}

inline double hsum(__m256d v) {
  double lane[4];
  _mm256_storeu_pd(lane, v);
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double r = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
  double r = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) r += a[i];
  return r;
}

double plogp_avx2(const double* p, std::size_t n) {
  const __m256d thresh = _mm256_set1_pd(1e-300);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(p + i);
    const __m256d live = _mm256_cmp_pd(v, thresh, _CMP_GE_OQ);
    const __m256d safe = _mm256_blendv_pd(one, v, live);
    const __m256d term = _mm256_and_pd(live, _mm256_mul_pd(v, log_pd(safe)));
    acc = _mm256_add_pd(acc, term);
  }
  double r = hsum(acc);
  for (; i < n; ++i)
    if (p[i] >= 1e-300) r += p[i] * std::log(p[i]);
  return r;
}

void exp_quadratic_avx2(double* out, std::size_t n, double c0, double c1, double c2) {
  const __m256d vc0 = _mm256_set1_pd(c0);
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vc2 = _mm256_set1_pd(c2);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d arg = _mm256_fmadd_pd(_mm256_fmadd_pd(vc2, idx, vc1), idx, vc0);
    _mm256_storeu_pd(out + i, exp_pd(arg));
    idx = _mm256_add_pd(idx, four);
  }
  for (; i < n; ++i) {
    const double x = static_cast<double>(i);
    out[i] = std::exp(c0 + x * (c1 + x * c2));
  }
}

}  // namespace

namespace detail {
const Ops avx2_ops = {dot_avx2, sum_avx2, plogp_avx2, exp_quadratic_avx2};
}

}  // namespace pbm::kernels

#else  // non-x86: alias the reference path so dispatch stays uniform

namespace pbm::kernels::detail {
const Ops avx2_ops = scalar_ops;
}

#endif
