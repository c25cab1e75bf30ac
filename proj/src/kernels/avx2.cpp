#include "topembed/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <limits>

#define TOPEMBED_AVX2 __attribute__((target("avx2")))

namespace topembed::kernels {
namespace {

TOPEMBED_AVX2 inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

TOPEMBED_AVX2 inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  hi = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, hi));
}

TOPEMBED_AVX2 inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  hi = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_min_sd(lo, hi));
}

TOPEMBED_AVX2 void supnorm_to_many_avx2(const double* query, std::size_t dim, const double* soa,
                                        std::size_t count, double* out) {
  const std::size_t body = count & ~std::size_t{3};
  for (std::size_t j = 0; j < body; j += 4) _mm256_storeu_pd(out + j, _mm256_setzero_pd());
  for (std::size_t j = body; j < count; ++j) out[j] = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double* column = soa + k * count;
    const __m256d q = _mm256_set1_pd(query[k]);
    for (std::size_t j = 0; j < body; j += 4) {
      const __m256d diff = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(column + j), q));
      _mm256_storeu_pd(out + j, _mm256_max_pd(_mm256_loadu_pd(out + j), diff));
    }
    for (std::size_t j = body; j < count; ++j) {
      const double diff = std::fabs(column[j] - query[k]);
      if (diff > out[j]) out[j] = diff;
    }
  }
}

TOPEMBED_AVX2 double min_masked_avx2(const double* values, const std::uint8_t* mask,
                                     std::size_t count) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t body = count & ~std::size_t{3};
  __m256d acc = _mm256_set1_pd(inf);
  const __m256d infs = _mm256_set1_pd(inf);
  for (std::size_t j = 0; j < body; j += 4) {
    std::int32_t packed;
    __builtin_memcpy(&packed, mask + j, 4);
    // Widen 4 mask bytes to 4 x 64-bit lanes and compare against zero.
    const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
    const __m256d keep =
        _mm256_castsi256_pd(_mm256_xor_si256(_mm256_cmpeq_epi64(wide, _mm256_setzero_si256()),
                                             _mm256_set1_epi64x(-1)));
    acc = _mm256_min_pd(acc, _mm256_blendv_pd(infs, _mm256_loadu_pd(values + j), keep));
  }
  double best = hmin(acc);
  for (std::size_t j = body; j < count; ++j) {
    if (mask[j] != 0 && values[j] < best) best = values[j];
  }
  return best;
}

TOPEMBED_AVX2 double max_where_key_le_avx2(const double* values, const double* keys,
                                           double bound, std::size_t count) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::size_t body = count & ~std::size_t{3};
  const __m256d b = _mm256_set1_pd(bound);
  const __m256d fill = _mm256_set1_pd(ninf);
  __m256d acc = fill;
  for (std::size_t j = 0; j < body; j += 4) {
    const __m256d keep = _mm256_cmp_pd(_mm256_loadu_pd(keys + j), b, _CMP_LE_OQ);
    acc = _mm256_max_pd(acc, _mm256_blendv_pd(fill, _mm256_loadu_pd(values + j), keep));
  }
  double best = hmax(acc);
  for (std::size_t j = body; j < count; ++j) {
    if (keys[j] <= bound && values[j] > best) best = values[j];
  }
  return best;
}

TOPEMBED_AVX2 double min_where_key_ge_avx2(const double* values, const double* keys,
                                           double bound, std::size_t count) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t body = count & ~std::size_t{3};
  const __m256d b = _mm256_set1_pd(bound);
  const __m256d fill = _mm256_set1_pd(inf);
  __m256d acc = fill;
  for (std::size_t j = 0; j < body; j += 4) {
    const __m256d keep = _mm256_cmp_pd(_mm256_loadu_pd(keys + j), b, _CMP_GE_OQ);
    acc = _mm256_min_pd(acc, _mm256_blendv_pd(fill, _mm256_loadu_pd(values + j), keep));
  }
  double best = hmin(acc);
  for (std::size_t j = body; j < count; ++j) {
    if (keys[j] >= bound && values[j] < best) best = values[j];
  }
  return best;
}

}  // namespace

namespace detail {
const KernelTable avx2_table{Isa::avx2, supnorm_to_many_avx2, min_masked_avx2,
                             max_where_key_le_avx2, min_where_key_ge_avx2};
}  // namespace detail

}  // namespace topembed::kernels

#endif
