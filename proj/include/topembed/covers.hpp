#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "topembed/ids.hpp"
#include "topembed/point_cloud.hpp"
#include "topembed/space.hpp"

namespace topembed {

/// Finite cover surrogate: labelled id subsets of a ground set.
struct Cover {
  IdSet ground;
  std::vector<IdSet> sets;
  std::vector<std::string> labels;

  /// Sorts each set, fills missing labels with "U<i>".
  static Cover make(IdSet ground, std::vector<IdSet> sets, std::vector<std::string> labels = {});

  std::size_t size() const { return sets.size(); }

  /// Throws ContractError when a set is empty, leaves the ground, or the
  /// union misses a ground point.
  void validate() const;
};

/// Number of sets containing each ground point, indexed like `cover.ground`.
std::vector<int> multiplicities(const Cover& cover);

/// max over ground points of (sets containing the point) - 1; -1 on an empty ground.
int order(const Cover& cover);

/// Order counted at points of `region` only; nullopt when the region is empty.
/// Throws ContractError if region is not inside the ground.
std::optional<int> order_in(const Cover& cover, const IdSet& region);

struct RefinementResult {
  bool refines = false;
  /// witness[j] = index of the first u-set containing v-set j (nullopt if none).
  std::vector<std::optional<std::size_t>> witness;
  /// First v-set without a containing u-set.
  std::optional<std::size_t> offending;
};

/// Throws ContractError when the grounds differ.
RefinementResult refines(const Cover& v, const Cover& u);

/// min over x of max over U containing x of d(x, ground \ U); d(x, {}) is
/// capped at diam + 1.
double lebesgue_number(const Cover& cover, const FiniteMetricSpace& space);

struct CubeCoverSpec {
  int n = 1;
  double lambda = 3.0;
  std::vector<double> lo;
  std::vector<double> hi;
  double pitch = 0.1;
};

struct CubeCover {
  Cover cover;
  PointCloud grid;
  std::vector<int> stratum;      // d of the cell behind each set
  std::vector<double> diameter;  // sup-norm diameter of each set on the grid
  bool diameters_exact_within = true;  // every diameter <= lambda/2, checked in exact arithmetic
};

/// Cell of the unit cube complex: per axis an integer k and whether the factor
/// is the open interval (k, k+1) or the point {k}.
struct UnitCell {
  std::vector<long> k;
  std::vector<bool> interval;
  int stratum() const;
  std::string label() const;
  auto operator<=>(const UnitCell&) const = default;
};

/// Closed-form membership of a (scaled) point in the neighbourhood U(cell).
bool in_cell_neighbourhood(const UnitCell& cell, std::span<const double> y);

/// The scaled cube cover restricted to the grid lo + pitch * Z^n inside the box.
CubeCover cube_cover(const CubeCoverSpec& spec);

/// V(S) = union of a2-sets whose first containing a1-set is S, in a1 order,
/// empty amalgams dropped. Requires a2 to refine a1 and x1 ∪ x2 = ground.
Cover merge_refinements(const Cover& a1, const Cover& a2, const IdSet& x1, const IdSet& x2);

/// Callback producing a refinement of `target` with small order on `region`.
using Refiner = std::function<Cover(const Cover& target, const IdSet& region, std::size_t stage)>;

struct StagedCoverResult {
  Cover cover;
  std::vector<std::optional<std::size_t>> witness;  // into u
  std::vector<int> stage_orders;                    // order of V_i in C_i
  std::size_t refiner_calls = 0;
};

/// Finite-stage construction of a refinement of `u` with order <= d from
/// refinements that have order <= d on each shell C_{i+1} \ C_i.
StagedCoverResult staged_cover(const Cover& u, const Exhaustion& exhaustion, const Refiner& refiner,
                               int d);

/// Honest refiner: splits each set of a fixed base cover by the first target
/// set containing each point. Order never exceeds that of `base`.
Refiner split_refiner(Cover base);

}  // namespace topembed
