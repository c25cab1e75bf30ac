#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topembed/covers.hpp"
#include "topembed/geometry.hpp"
#include "topembed/maps.hpp"
#include "topembed/space.hpp"

namespace topembed {

inline constexpr double kFiberTau = 1e-9;

struct SmallOrderCover {
  Cover cover;
  int rounds = 0;
  int order = 0;
  double max_diameter = 0.0;        // in the sample metric
  double max_image_diameter = 0.0;  // sup-norm diameter of f over a set
};

/// Open-star cover of the coarsest subdivision (0..budget rounds) whose sets,
/// restricted to `region`, have diameter < eps/2 and image diameter <= r/2.
/// Throws PipelineError when the budget runs out.
SmallOrderCover small_order_cover(const SampleSet& samples, const FiniteMetricSpace& space,
                                  const IdSet& region, double eps, const PointCloud& f, double r,
                                  int budget = 8);

struct PerturbationReport {
  double eps = 0.0;
  double r = 0.0;
  double rho = 0.0;  // rho(f, g) over all samples
  double tau = kFiberTau;
  double delta_before_exact = 0.0;
  double delta_before_tau = 0.0;
  double delta_after_exact = 0.0;
  double delta_after_tau = 0.0;
  double claim1_max = 0.0;  // max over the region of |g~ - f|
  int cover_order = 0;
  int rounds = 0;
  std::size_t cover_sets = 0;
  bool zs_general_position = false;
  std::string general_position_scope;  // "full" or "support_pairs"
  std::size_t gp_redraws = 0;
  double blend_width = 0.0;
  std::size_t claim2_pairs = 0;
  double claim2_max_weight_diff = 0.0;
  std::uint64_t seed = 0;
  std::string status;  // "ok" or "postcondition_failed"
};

struct PerturbationStep {
  PointCloud g;
  PerturbationReport report;
  PointCloud g_tilde;  // rows outside the region are zero
  PartitionOfUnity weights;
};

/// One density step: returns g with rho(f, g) <= r and small fibers on the
/// region. f must map into R^(2n+1).
PerturbationStep perturb_step(const PointCloud& f, const SampleSet& samples, const FiniteMetricSpace& space,
                              const IdSet& region, double eps, double r, std::uint64_t seed);

struct SimplexPairResult {
  std::size_t first;
  std::size_t second;
  Intersection result;
};

struct StepSummary {
  std::size_t k = 0;
  std::size_t stage = 0;
  double eps = 0.0;
  double r = 0.0;
  PerturbationReport report;
  std::size_t equal_image_pairs = 0;  // over all samples, at kFiberTau
};

struct EmbeddingCertificate {
  std::string method;
  bool passed = false;
  std::vector<std::string> failures;
  std::size_t target_dim = 0;

  std::size_t pairs_checked = 0;
  std::size_t disjoint_pairs = 0;
  std::size_t common_face_pairs = 0;
  std::vector<SimplexPairResult> improper_pairs;

  double resolution = 0.0;
  double injectivity_margin = 0.0;
  std::optional<std::pair<PointId, PointId>> margin_witness;

  std::optional<EscapeReport> properness;

  std::vector<StepSummary> steps;
  std::size_t initial_equal_image_pairs = 0;
  double rho_budget = 0.0;
  double rho_total = 0.0;
  bool equal_pairs_nonincreasing = true;

  /// True only when general position proves injectivity of the whole PL map.
  bool continuum_injective = false;
};

/// Exact pairwise checks over all simplex pairs of a PL map.
void check_simplex_pairs(const PLMap& map, EmbeddingCertificate& cert);

/// Smallest sup-norm image distance over sample pairs at distance >= resolution.
void injectivity_margin(const PointCloud& f, const FiniteMetricSpace& space, double resolution,
                        EmbeddingCertificate& cert);

/// Count of sample pairs whose images lie within tau.
std::size_t equal_image_pairs(const PointCloud& f, double tau = kFiberTau);

EmbeddingCertificate verify_embedding(const PLMap& map, const SampleSet& samples, const FiniteMetricSpace& space,
                                      const Exhaustion* exhaustion = nullptr, double resolution = 0.0);

struct IterativeEmbedding {
  PointCloud initial;
  PointCloud final_map;
  PLMap vertex_map;
  EmbeddingCertificate certificate;
};

/// K perturbation steps with eps_k = 1/k and r_k = 2^-(k+1) over the stages
/// (cycled), starting from (proper height / K, reference coordinates).
IterativeEmbedding embed_iterative(const Realization& realization, const Exhaustion& exhaustion, int K,
                                   std::uint64_t seed);

struct PLEmbedding {
  PLMap map;
  EmbeddingCertificate certificate;
};

/// Vertex images drawn in general position around a line with r = 1, in
/// dimension 2n + 1 unless `force_dim` is given.
PLEmbedding pl_embed(std::shared_ptr<const SimplicialComplex> complex, std::uint64_t seed,
                     std::optional<std::size_t> force_dim = std::nullopt, double mesh = 0.25);

/// SplitMix64 finalizer, used to derive per-step seeds.
std::uint64_t mix_seed(std::uint64_t value);

}  // namespace topembed
