#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "topembed/covers.hpp"
#include "topembed/geometry.hpp"
#include "topembed/point_cloud.hpp"
#include "topembed/space.hpp"

namespace topembed {

/// Map into R^N fixed by vertex images and extended affinely over simplices.
class PLMap {
 public:
  PLMap() = default;
  PLMap(std::shared_ptr<const SimplicialComplex> complex, PointCloud vertex_images);

  const SimplicialComplex& complex() const { return *complex_; }
  std::shared_ptr<const SimplicialComplex> complex_ptr() const { return complex_; }
  std::size_t target_dim() const { return images_.dim(); }
  const PointCloud& vertex_images() const { return images_; }
  Point image(PointId vertex) const { return images_.point(vertex); }

  /// Barycentric combination of the images of `simplex`'s vertices. Throws
  /// ContractError for an unknown simplex or a malformed coordinate vector.
  Point evaluate(std::size_t simplex, std::span<const double> barycentric) const;
  Point evaluate(const Simplex& simplex, std::span<const double> barycentric) const;

  /// Images of all samples, computed from the integer lattice numerators.
  PointCloud on_samples(const SampleSet& samples) const;

 private:
  std::shared_ptr<const SimplicialComplex> complex_;
  PointCloud images_;
};

struct FiberResult {
  double value = 0.0;
  std::optional<std::pair<PointId, PointId>> witness;
};

/// max d(x, y) over x, y in region with |f(x) - f(y)|_inf <= tau.
FiberResult fiber_diameter(const PointCloud& f, const IdSet& region, double tau,
                           const FiniteMetricSpace& space);

bool in_U_eps(const PointCloud& f, const IdSet& region, double eps, double tau,
              const FiniteMetricSpace& space);

/// Distance-quotient weights phi_i(x) = g_i(x) / sum_j g_j(x) with
/// g_i(x) = d(x, ground \ U_i), and g_i = 1 when U_i is the whole ground.
class PartitionOfUnity {
 public:
  struct Entry {
    std::size_t set;
    double weight;
  };

  PartitionOfUnity() = default;
  PartitionOfUnity(IdSet ground, std::size_t set_count, std::vector<std::size_t> offsets,
                   std::vector<Entry> entries);

  const IdSet& ground() const { return ground_; }
  std::size_t set_count() const { return set_count_; }

  /// Nonzero weights at the ground point with position `position`.
  std::span<const Entry> at_position(std::size_t position) const;
  /// Nonzero weights at ground point x; throws if x is not in the ground.
  std::span<const Entry> at(PointId x) const;
  double weight(std::size_t set, PointId x) const;

  /// Dense weight vector at x.
  std::vector<double> dense(PointId x) const;

  bool operator==(const PartitionOfUnity&) const;

 private:
  IdSet ground_;
  std::size_t set_count_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

PartitionOfUnity partition_of_unity(const Cover& cover, const FiniteMetricSpace& space);

/// f(x) = sum_k k * phi_k(x) for the annulus cover U_k = C_{k+1} \ C_{k-1}
/// (C_0 = {}, C_{K+1} = C_K). f = 1 on C_1 and f lies in [j-1, j] on C_j \ C_{j-1}.
std::vector<double> proper_height(const Exhaustion& exhaustion, const FiniteMetricSpace& space);

struct EscapeReport {
  bool escapes = true;
  std::vector<double> ladder;
  std::vector<std::optional<std::size_t>> witness_stage;  // 0-based stage index per R
  std::vector<double> outside_min_norm;                   // per stage; +inf when nothing lies outside
};

/// For each R, the first stage C with |f(x)|_inf > R for every sample x outside C.
/// The stages may cover only part of f's domain.
EscapeReport escapes_to_infinity(const PointCloud& f, const Exhaustion& exhaustion,
                                 const std::vector<double>& ladder);

/// H(x) = beta(x) * h(pi(x)) with pi the nearest region sample (lowest id on
/// ties) and beta = max(0, 1 - d(x, region) / w). `h` is indexed by sample;
/// rows outside the region are ignored.
PointCloud blend_extend(const PointCloud& h, const IdSet& region, const FiniteMetricSpace& space, double w,
                        double bound);

}  // namespace topembed
