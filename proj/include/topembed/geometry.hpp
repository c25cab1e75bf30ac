#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "topembed/ids.hpp"
#include "topembed/point_cloud.hpp"

namespace topembed {

using Point = std::vector<double>;

enum class Arithmetic { exact, floating };

/// min(1, sup-norm of x - y). Throws ContractError on a dimension mismatch.
double delta_metric(std::span<const double> x, std::span<const double> y);

struct RhoResult {
  double value = 0.0;
  std::optional<PointId> witness;  // sample attaining the maximum
};

/// max over `samples` of delta_metric(f(x), g(x)).
RhoResult rho_metric(const PointCloud& f, const PointCloud& g, const IdSet& samples);

/// Rank of the points augmented with a leading 1, i.e. one plus the affine rank.
std::size_t affine_rank(const std::vector<Point>& points, Arithmetic mode = Arithmetic::exact);
std::size_t affine_rank(const std::vector<std::vector<mpq_class>>& points);

/// True iff no nontrivial affine combination of the points vanishes. More than
/// dim + 1 points are never independent.
bool is_affinely_independent(const std::vector<Point>& points, Arithmetic mode = Arithmetic::exact);

/// Every subset of at most dim + 1 points is affinely independent. Throws
/// ContractError when more than `guard` points are given.
bool is_general_position(const std::vector<Point>& points, Arithmetic mode = Arithmetic::exact,
                         std::size_t guard = 64);

struct PerturbOptions {
  int retry_budget = 1000;
  Arithmetic mode = Arithmetic::exact;
  /// When set, only these index families must be in general position instead
  /// of the whole point set.
  std::optional<std::vector<IdSet>> families;
};

struct PerturbResult {
  std::vector<Point> points;
  std::size_t redraws = 0;
  std::size_t subset_checks = 0;
};

/// Keeps the first point, draws every later point uniformly from the open
/// sup-norm ball of radius r around its input until each new subset of at most
/// dim + 1 points containing it is affinely independent.
PerturbResult perturb_to_general_position(const std::vector<Point>& points, double r,
                                          std::uint64_t seed, const PerturbOptions& options = {});

enum class Intersection { disjoint, intersect_in_common_face, intersect_improperly };

std::string_view intersection_name(Intersection result);

/// Decides how the convex hulls of two geometric simplices meet, exactly.
/// Vertices with identical coordinates count as shared.
Intersection simplices_disjoint(const std::vector<Point>& s1, const std::vector<Point>& s2);
Intersection simplices_disjoint(const std::vector<std::vector<mpq_class>>& s1,
                                const std::vector<std::vector<mpq_class>>& s2);

/// Maximizes c.x subject to A x = b, x >= 0 in exact arithmetic (Bland's rule).
/// Returns nullopt when infeasible. The problem must be bounded.
std::optional<mpq_class> lp_maximize(const std::vector<std::vector<mpq_class>>& A,
                                     const std::vector<mpq_class>& b, const std::vector<mpq_class>& c);

/// Calls `visit` with every k-subset of {0..n-1} in lexicographic order; stops
/// early when `visit` returns false.
template <class Visit>
bool for_each_combination(std::size_t n, std::size_t k, Visit&& visit) {
  if (k > n) return true;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!visit(static_cast<const std::vector<std::size_t>&>(idx))) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Binomial coefficient saturated at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace topembed
