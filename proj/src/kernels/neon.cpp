#include "topembed/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace topembed::kernels {
namespace {

void supnorm_to_many_neon(const double* query, std::size_t dim, const double* soa,
                          std::size_t count, double* out) {
  const std::size_t body = count & ~std::size_t{1};
  for (std::size_t j = 0; j < count; ++j) out[j] = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double* column = soa + k * count;
    const float64x2_t q = vdupq_n_f64(query[k]);
    for (std::size_t j = 0; j < body; j += 2) {
      const float64x2_t diff = vabdq_f64(vld1q_f64(column + j), q);
      vst1q_f64(out + j, vmaxq_f64(vld1q_f64(out + j), diff));
    }
    for (std::size_t j = body; j < count; ++j) {
      const double diff = std::fabs(column[j] - query[k]);
      if (diff > out[j]) out[j] = diff;
    }
  }
}

double min_masked_neon(const double* values, const std::uint8_t* mask, std::size_t count) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t body = count & ~std::size_t{1};
  const float64x2_t fill = vdupq_n_f64(inf);
  float64x2_t acc = fill;
  for (std::size_t j = 0; j < body; j += 2) {
    const uint64_t lanes[2] = {mask[j] != 0 ? ~uint64_t{0} : 0, mask[j + 1] != 0 ? ~uint64_t{0} : 0};
    const uint64x2_t keep = vld1q_u64(lanes);
    acc = vminq_f64(acc, vbslq_f64(keep, vld1q_f64(values + j), fill));
  }
  double best = vminvq_f64(acc);
  for (std::size_t j = body; j < count; ++j) {
    if (mask[j] != 0 && values[j] < best) best = values[j];
  }
  return best;
}

double max_where_key_le_neon(const double* values, const double* keys, double bound,
                             std::size_t count) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::size_t body = count & ~std::size_t{1};
  const float64x2_t b = vdupq_n_f64(bound);
  const float64x2_t fill = vdupq_n_f64(ninf);
  float64x2_t acc = fill;
  for (std::size_t j = 0; j < body; j += 2) {
    const uint64x2_t keep = vcleq_f64(vld1q_f64(keys + j), b);
    acc = vmaxq_f64(acc, vbslq_f64(keep, vld1q_f64(values + j), fill));
  }
  double best = vmaxvq_f64(acc);
  for (std::size_t j = body; j < count; ++j) {
    if (keys[j] <= bound && values[j] > best) best = values[j];
  }
  return best;
}

double min_where_key_ge_neon(const double* values, const double* keys, double bound,
                             std::size_t count) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t body = count & ~std::size_t{1};
  const float64x2_t b = vdupq_n_f64(bound);
  const float64x2_t fill = vdupq_n_f64(inf);
  float64x2_t acc = fill;
  for (std::size_t j = 0; j < body; j += 2) {
    const uint64x2_t keep = vcgeq_f64(vld1q_f64(keys + j), b);
    acc = vminq_f64(acc, vbslq_f64(keep, vld1q_f64(values + j), fill));
  }
  double best = vminvq_f64(acc);
  for (std::size_t j = body; j < count; ++j) {
    if (keys[j] >= bound && values[j] < best) best = values[j];
  }
  return best;
}

}  // namespace

namespace detail {
const KernelTable neon_table{Isa::neon, supnorm_to_many_neon, min_masked_neon,
                             max_where_key_le_neon, min_where_key_ge_neon};
}  // namespace detail

}  // namespace topembed::kernels

#endif
