#include <cmath>
#include <limits>

#include "topembed/kernels.hpp"

namespace topembed::kernels {
namespace {

void supnorm_to_many_scalar(const double* query, std::size_t dim, const double* soa,
                            std::size_t count, double* out) {
  for (std::size_t j = 0; j < count; ++j) out[j] = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double* column = soa + k * count;
    const double q = query[k];
    for (std::size_t j = 0; j < count; ++j) {
      const double diff = std::fabs(column[j] - q);
      if (diff > out[j]) out[j] = diff;
    }
  }
}

double min_masked_scalar(const double* values, const std::uint8_t* mask, std::size_t count) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    if (mask[j] != 0 && values[j] < best) best = values[j];
  }
  return best;
}

double max_where_key_le_scalar(const double* values, const double* keys, double bound,
                               std::size_t count) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    if (keys[j] <= bound && values[j] > best) best = values[j];
  }
  return best;
}

double min_where_key_ge_scalar(const double* values, const double* keys, double bound,
                               std::size_t count) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    if (keys[j] >= bound && values[j] < best) best = values[j];
  }
  return best;
}

}  // namespace

namespace detail {
const KernelTable scalar_table{Isa::scalar, supnorm_to_many_scalar, min_masked_scalar,
                               max_where_key_le_scalar, min_where_key_ge_scalar};
}  // namespace detail

}  // namespace topembed::kernels
