#include <atomic>
#include <cstdlib>
#include <string_view>

#include "topembed/kernels.hpp"

namespace topembed::kernels {
namespace {

const KernelTable* detect() {
  if (const char* forced = std::getenv("TOPEMBED_ISA")) {
    if (std::string_view(forced) == "scalar") return &detail::scalar_table;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (supported(Isa::avx2)) return &detail::avx2_table;
#endif
#if defined(__aarch64__)
  return &detail::neon_table;
#endif
  return &detail::scalar_table;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) return detail::scalar_table;
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2:
      return detail::avx2_table;
#endif
#if defined(__aarch64__)
    case Isa::neon:
      return detail::neon_table;
#endif
    default:
      return detail::scalar_table;
  }
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

ScopedIsa::ScopedIsa(Isa isa) : previous_(&active()) {
  current().store(&table(isa), std::memory_order_release);
}

ScopedIsa::~ScopedIsa() { current().store(previous_, std::memory_order_release); }

void supnorm_to_many(std::span<const double> query, std::span<const double> soa,
                     std::size_t count, std::span<double> out) {
  active().supnorm_to_many(query.data(), query.size(), soa.data(), count, out.data());
}

double min_masked(std::span<const double> values, std::span<const std::uint8_t> mask) {
  return active().min_masked(values.data(), mask.data(), values.size());
}

double max_where_key_le(std::span<const double> values, std::span<const double> keys,
                        double bound) {
  return active().max_where_key_le(values.data(), keys.data(), bound, values.size());
}

double min_where_key_ge(std::span<const double> values, std::span<const double> keys,
                        double bound) {
  return active().min_where_key_ge(values.data(), keys.data(), bound, values.size());
}

}  // namespace topembed::kernels
