#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topembed/ids.hpp"
#include "topembed/point_cloud.hpp"

namespace topembed {

/// Finite metric space with a dense distance matrix and string point labels.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;

  /// Validates symmetry, zero diagonal, positivity off the diagonal and the
  /// triangle inequality (tolerance 1e-12). Throws ContractError.
  static FiniteMetricSpace from_matrix(std::vector<std::string> ids, std::vector<double> dist);

  /// Sup-norm distances between the given coordinates. Distinct points must
  /// have distinct coordinates.
  static FiniteMetricSpace from_coordinates(std::vector<std::string> ids, const PointCloud& coords);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<PointId> find(std::string_view label) const;

  double operator()(PointId a, PointId b) const { return dist_[a * size() + b]; }
  std::span<const double> row(PointId a) const { return {dist_.data() + a * size(), size()}; }

  double diameter() const;
  double diameter_of(const IdSet& subset) const;

  /// d(x, target) = min over target; +inf when target is empty.
  double distance_to(PointId x, const IdSet& target) const;

  /// Checks all metric axioms, O(n^3). Returns an explanation on failure.
  std::optional<std::string> check_axioms(double tolerance = 1e-12) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> dist_;
};

using Simplex = std::vector<PointId>;  // sorted vertex indices

/// Abstract simplicial complex. Simplices are kept sorted by size, then
/// lexicographically; that order defines simplex ids.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  /// Takes the simplices as listed (after sorting vertices inside each);
  /// does not close under faces. Call validate() to check the invariants.
  SimplicialComplex(int n, std::vector<std::string> vertex_labels, std::vector<Simplex> simplices);

  /// Closes `facets` under taking nonempty faces; n is the largest facet dimension.
  static SimplicialComplex from_facets(std::vector<std::string> vertex_labels,
                                       std::vector<Simplex> facets);

  /// Throws ContractError if not face-closed, if some simplex exceeds n + 1
  /// vertices, if no simplex has n + 1 vertices, or on a dangling vertex index.
  void validate() const;

  int dimension() const { return n_; }
  std::size_t vertex_count() const { return labels_.size(); }
  const std::vector<std::string>& vertex_labels() const { return labels_; }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  std::optional<std::size_t> find(const Simplex& s) const;
  std::optional<PointId> find_vertex(std::string_view label) const;

  /// Simplices not contained in a larger listed simplex.
  std::vector<std::size_t> facets() const;

 private:
  int n_ = 0;
  std::vector<std::string> labels_;
  std::vector<Simplex> simplices_;
};

/// A point of the geometric realization given on the lattice of barycentric
/// coordinates with denominator `resolution`. All numerators are positive, so
/// `simplex` is the point's carrier.
struct Sample {
  std::size_t simplex;
  std::vector<std::uint32_t> lattice;
};

/// Finite surrogate for the points of the realization. Samples are the
/// resolution-m barycentric lattice of every simplex, each point listed once
/// under its carrier, enumerated by simplex id then lexicographic lattice order.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::shared_ptr<const SimplicialComplex> complex, std::uint32_t resolution,
            double mesh);

  const SimplicialComplex& complex() const { return *complex_; }
  std::shared_ptr<const SimplicialComplex> complex_ptr() const { return complex_; }
  std::uint32_t resolution() const { return resolution_; }
  double mesh() const { return mesh_; }
  std::size_t size() const { return samples_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<Sample>& samples() const { return samples_; }

  std::vector<double> barycentric(std::size_t i) const;

  /// Sample index of every vertex (the 0-simplex samples).
  std::vector<PointId> vertex_samples() const;

  /// Sample labels of the form "s<index>".
  std::vector<std::string> labels() const;

  /// Positions of the samples under the linear extension of vertex coordinates.
  PointCloud positions(const PointCloud& vertex_coords) const;

 private:
  std::shared_ptr<const SimplicialComplex> complex_;
  std::uint32_t resolution_ = 1;
  double mesh_ = 0.0;
  std::vector<Sample> samples_;
};

/// Samples, metric and reference positions produced by realize_metric.
struct Realization {
  SampleSet samples;
  FiniteMetricSpace space;
  PointCloud positions;
};

/// Samples the realization given by `vertex_coords` with intra-simplex gap at
/// most `mesh`, measured in the sup-norm of the reference coordinates.
Realization realize_metric(std::shared_ptr<const SimplicialComplex> complex,
                           const PointCloud& vertex_coords, double mesh);

/// Standard-simplex coordinates: vertex v goes to the basis vector e_v.
PointCloud standard_simplex_coords(const SimplicialComplex& complex);

/// Nested stages C_1 ⊆ ... ⊆ C_K of a finite ground set.
struct Exhaustion {
  std::vector<IdSet> stages;

  std::size_t size() const { return stages.size(); }
  const IdSet& stage(std::size_t k) const { return stages[k]; }
  /// Throws ContractError unless stages are nested, C_1 is nonempty and the
  /// last stage equals `ground`.
  void validate(const IdSet& ground) const;
};

/// Stage k holds the first ceil(k * n / batch_count) points ordered by
/// distance from the first point (ties by id).
Exhaustion build_exhaustion(const FiniteMetricSpace& space, int batch_count);

}  // namespace topembed
