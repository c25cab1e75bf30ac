#pragma once

// Data-parallel inner loops shared by the metric, fiber and partition code.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant is
// picked once at first use from the CPU's reported features; setting
// TOPEMBED_ISA=scalar in the environment pins the scalar path. All kernels
// only use max/min/abs/compare, so every variant returns bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace topembed::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // out[j] = max_k |soa[k * count + j] - query[k]|, k < dim, j < count.
  void (*supnorm_to_many)(const double* query, std::size_t dim, const double* soa,
                          std::size_t count, double* out);
  // min of values[j] over j with mask[j] != 0; +inf when the mask is empty.
  double (*min_masked)(const double* values, const std::uint8_t* mask, std::size_t count);
  // max of values[j] over j with keys[j] <= bound; -inf when none qualifies.
  double (*max_where_key_le)(const double* values, const double* keys, double bound,
                             std::size_t count);
  // min of values[j] over j with keys[j] >= bound; +inf when none qualifies.
  double (*min_where_key_ge)(const double* values, const double* keys, double bound,
                             std::size_t count);
};

/// Table for the variant selected at startup.
const KernelTable& active();

/// True when `isa` can run on this machine.
bool supported(Isa isa);

/// Table for a specific variant; falls back to scalar when unsupported.
const KernelTable& table(Isa isa);

/// Scoped override of the active table, used by equivalence tests.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  const KernelTable* previous_;
};

// Span conveniences over the active table.
void supnorm_to_many(std::span<const double> query, std::span<const double> soa,
                     std::size_t count, std::span<double> out);
double min_masked(std::span<const double> values, std::span<const std::uint8_t> mask);
double max_where_key_le(std::span<const double> values, std::span<const double> keys,
                        double bound);
double min_where_key_ge(std::span<const double> values, std::span<const double> keys,
                        double bound);

namespace detail {
extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
#if defined(__aarch64__)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace topembed::kernels
