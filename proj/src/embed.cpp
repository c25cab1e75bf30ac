#include "topembed/embed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "topembed/error.hpp"
#include "topembed/subdivision.hpp"

namespace topembed {

std::uint64_t mix_seed(std::uint64_t value) {
  value += 0x9e3779b97f4a7c15ULL;
  value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
  value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
  return value ^ (value >> 31);
}

namespace {

double image_diameter(const PointCloud& f, const IdSet& set) {
  double best = 0.0;
  for (std::size_t k = 0; k < f.dim(); ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (PointId x : set) {
      lo = std::min(lo, f(x, k));
      hi = std::max(hi, f(x, k));
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

// Upper limit on the number of (N + 1)-subsets checked for full general position.
constexpr std::uint64_t kFullGeneralPositionLimit = 4'000'000;

}  // namespace

SmallOrderCover small_order_cover(const SampleSet& samples, const FiniteMetricSpace& space,
                                  const IdSet& region, double eps, const PointCloud& f, double r,
                                  int budget) {
  if (!(eps > 0.0) || !(r > 0.0)) throw ContractError("eps and r must be positive");
  if (region.empty()) throw ContractError("region is empty");
  if (region.back() >= samples.size()) throw ContractError("region leaves the sample set");
  SubdivisionCarriers level = subdivide(samples, 0);
  for (int rounds = 0; rounds <= budget; ++rounds) {
    if (rounds > 0) level = subdivide_once(level);
    SmallOrderCover out;
    out.cover = star_cover(level, region);
    out.rounds = rounds;
    out.order = order(out.cover);
    bool ok = out.order <= samples.complex().dimension();
    for (const auto& set : out.cover.sets) {
      out.max_diameter = std::max(out.max_diameter, space.diameter_of(set));
      out.max_image_diameter = std::max(out.max_image_diameter, image_diameter(f, set));
    }
    ok = ok && out.max_diameter < eps / 2 && out.max_image_diameter <= r / 2;
    if (ok) return out;
  }
  throw PipelineError("subdivision budget of " + std::to_string(budget) +
                      " rounds exhausted before the star cover became small enough");
}

PerturbationStep perturb_step(const PointCloud& f, const SampleSet& samples, const FiniteMetricSpace& space,
                              const IdSet& region, double eps, double r, std::uint64_t seed) {
  const int n = samples.complex().dimension();
  const std::size_t N = f.dim();
  if (N != static_cast<std::size_t>(2 * n + 1)) throw ContractError("perturbation step needs target dimension 2n+1");
  if (!(r > 0.0 && r < 1.0)) throw ContractError("perturbation radius must lie in (0, 1)");
  if (!(eps > 0.0)) throw ContractError("eps must be positive");
  if (f.size() != samples.size() || space.size() != samples.size()) {
    throw ContractError("map, samples and space disagree in size");
  }

  PerturbationStep step;
  PerturbationReport& rep = step.report;
  rep.eps = eps;
  rep.r = r;
  rep.seed = seed;
  rep.blend_width = eps / 2;
  rep.delta_before_exact = fiber_diameter(f, region, 0.0, space).value;
  rep.delta_before_tau = fiber_diameter(f, region, rep.tau, space).value;

  const SmallOrderCover soc = small_order_cover(samples, space, region, eps, f, r);
  rep.cover_order = soc.order;
  rep.rounds = soc.rounds;
  rep.cover_sets = soc.cover.size();
  step.weights = partition_of_unity(soc.cover, space);
  const PartitionOfUnity& phi = step.weights;

  // Anchors x_i (lowest id in U_i) and their images.
  const std::size_t m = soc.cover.size();
  std::vector<Point> anchors(m);
  for (std::size_t i = 0; i < m; ++i) anchors[i] = f.point(soc.cover.sets[i].front());

  PerturbOptions options;
  if (binomial(m, N + 1) <= kFullGeneralPositionLimit) {
    rep.general_position_scope = "full";
  } else {
    rep.general_position_scope = "support_pairs";
    std::set<IdSet> supports;
    for (std::size_t p = 0; p < region.size(); ++p) {
      IdSet s;
      for (const auto& e : phi.at_position(p)) s.push_back(static_cast<PointId>(e.set));
      supports.insert(make_id_set(std::move(s)));
    }
    std::set<IdSet> families;
    for (auto a = supports.begin(); a != supports.end(); ++a) {
      for (auto b = a; b != supports.end(); ++b) families.insert(set_union(*a, *b));
    }
    options.families = std::vector<IdSet>(families.begin(), families.end());
  }
  const PerturbResult z = perturb_to_general_position(anchors, r / 2, seed, options);
  rep.gp_redraws = z.redraws;
  if (options.families) {
    rep.zs_general_position = true;
    for (const auto& fam : *options.families) {
      std::vector<Point> pts;
      for (PointId i : fam) pts.push_back(z.points[i]);
      if (!is_affinely_independent(pts)) rep.zs_general_position = false;
    }
  } else {
    rep.zs_general_position = is_general_position(z.points, Arithmetic::exact, std::max<std::size_t>(64, m));
  }

  // g~ on the region, h = f - g~.
  step.g_tilde = PointCloud(samples.size(), N);
  PointCloud h(samples.size(), N);
  for (std::size_t p = 0; p < region.size(); ++p) {
    const PointId x = region[p];
    for (std::size_t k = 0; k < N; ++k) {
      double acc = 0.0;
      for (const auto& e : phi.at_position(p)) acc += e.weight * z.points[e.set][k];
      step.g_tilde(x, k) = acc;
      h(x, k) = f(x, k) - acc;
      rep.claim1_max = std::max(rep.claim1_max, std::fabs(h(x, k)));
    }
  }
  if (!(rep.claim1_max < r)) {
    throw PipelineError("perturbation moved a region sample by " + std::to_string(rep.claim1_max) +
                        " >= r = " + std::to_string(r));
  }

  const PointCloud H = blend_extend(h, region, space, rep.blend_width, r);
  step.g = PointCloud(samples.size(), N);
  for (PointId x = 0; x < samples.size(); ++x) {
    for (std::size_t k = 0; k < N; ++k) step.g(x, k) = f(x, k) - H(x, k);
  }
  for (PointId x : region) {
    for (std::size_t k = 0; k < N; ++k) step.g(x, k) = step.g_tilde(x, k);
  }

  rep.rho = rho_metric(f, step.g, iota_ids(samples.size())).value;
  rep.delta_after_exact = fiber_diameter(step.g, region, 0.0, space).value;
  rep.delta_after_tau = fiber_diameter(step.g, region, rep.tau, space).value;

  // Near-coincident images on the region must come from equal weight vectors.
  for (std::size_t a = 0; a < region.size(); ++a) {
    for (std::size_t b = a + 1; b < region.size(); ++b) {
      const PointId x = region[a];
      const PointId y = region[b];
      if (step.g.supnorm(x, y) > rep.tau) continue;
      ++rep.claim2_pairs;
      const auto wx = phi.dense(x);
      const auto wy = phi.dense(y);
      for (std::size_t i = 0; i < m; ++i) rep.claim2_max_weight_diff = std::max(rep.claim2_max_weight_diff, std::fabs(wx[i] - wy[i]));
    }
  }

  rep.status = (rep.rho <= r && rep.delta_after_tau < eps) ? "ok" : "postcondition_failed";
  return step;
}

// ---------------------------------------------------------------------------

void check_simplex_pairs(const PLMap& map, EmbeddingCertificate& cert) {
  const auto& simplices = map.complex().simplices();
  std::vector<std::vector<std::vector<mpq_class>>> exact(simplices.size());
  std::vector<std::vector<mpq_class>> vertex_exact(map.complex().vertex_count());
  for (PointId v = 0; v < vertex_exact.size(); ++v) {
    for (double c : map.image(v)) vertex_exact[v].push_back(mpq_class(c));
  }
  std::vector<bool> degenerate(simplices.size(), false);
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    for (PointId v : simplices[s]) exact[s].push_back(vertex_exact[v]);
    if (simplices[s].size() > map.target_dim() + 1 || affine_rank(exact[s]) != simplices[s].size()) {
      degenerate[s] = true;
    }
  }
  for (std::size_t a = 0; a < simplices.size(); ++a) {
    for (std::size_t b = a + 1; b < simplices.size(); ++b) {
      ++cert.pairs_checked;
      Intersection result;
      if (degenerate[a] || degenerate[b]) {
        result = Intersection::intersect_improperly;
      } else {
        result = simplices_disjoint(exact[a], exact[b]);
      }
      switch (result) {
        case Intersection::disjoint:
          ++cert.disjoint_pairs;
          break;
        case Intersection::intersect_in_common_face:
          ++cert.common_face_pairs;
          break;
        case Intersection::intersect_improperly:
          cert.improper_pairs.push_back({a, b, result});
          break;
      }
    }
  }
  if (std::any_of(degenerate.begin(), degenerate.end(), [](bool d) { return d; })) {
    cert.failures.push_back("some simplex has affinely dependent vertex images");
  }
  if (!cert.improper_pairs.empty()) {
    const auto& p = cert.improper_pairs.front();
    cert.failures.push_back("simplices " + std::to_string(p.first) + " and " + std::to_string(p.second) +
                            " intersect improperly");
  }
}

void injectivity_margin(const PointCloud& f, const FiniteMetricSpace& space, double resolution,
                        EmbeddingCertificate& cert) {
  cert.resolution = resolution;
  cert.injectivity_margin = std::numeric_limits<double>::infinity();
  cert.margin_witness.reset();
  std::vector<double> query(f.dim());
  std::vector<double> dist(f.size());
  for (PointId x = 0; x < f.size(); ++x) {
    for (std::size_t k = 0; k < f.dim(); ++k) query[k] = f(x, k);
    f.supnorm_row(query, dist);
    const auto row = space.row(x);
    for (PointId y = x + 1; y < f.size(); ++y) {
      if (row[y] < resolution || row[y] == 0.0) continue;
      if (dist[y] < cert.injectivity_margin) {
        cert.injectivity_margin = dist[y];
        cert.margin_witness = std::make_pair(x, y);
      }
    }
  }
  if (!(cert.injectivity_margin > 0.0)) {
    cert.failures.push_back("samples " + std::to_string(cert.margin_witness->first) + " and " +
                            std::to_string(cert.margin_witness->second) + " share an image");
  }
}

std::size_t equal_image_pairs(const PointCloud& f, double tau) {
  std::size_t count = 0;
  std::vector<double> query(f.dim());
  std::vector<double> dist(f.size());
  for (PointId x = 0; x < f.size(); ++x) {
    for (std::size_t k = 0; k < f.dim(); ++k) query[k] = f(x, k);
    f.supnorm_row(query, dist);
    for (PointId y = x + 1; y < f.size(); ++y) {
      if (dist[y] <= tau) ++count;
    }
  }
  return count;
}

namespace {

std::vector<double> default_ladder(const PointCloud& f) {
  const double top = max_supnorm(f);
  return {0.25 * top, 0.5 * top, 0.75 * top};
}

void finish(EmbeddingCertificate& cert) { cert.passed = cert.failures.empty(); }

}  // namespace

EmbeddingCertificate verify_embedding(const PLMap& map, const SampleSet& samples, const FiniteMetricSpace& space,
                                      const Exhaustion* exhaustion, double resolution) {
  EmbeddingCertificate cert;
  cert.method = "verify";
  cert.target_dim = map.target_dim();
  check_simplex_pairs(map, cert);
  const PointCloud f = map.on_samples(samples);
  injectivity_margin(f, space, resolution, cert);
  if (exhaustion) cert.properness = escapes_to_infinity(f, *exhaustion, default_ladder(f));
  cert.continuum_injective = cert.improper_pairs.empty() && cert.failures.empty();
  finish(cert);
  return cert;
}

IterativeEmbedding embed_iterative(const Realization& realization, const Exhaustion& exhaustion, int K,
                                   std::uint64_t seed) {
  if (K < 1) throw ContractError("stage count K must be at least 1");
  const SampleSet& samples = realization.samples;
  const FiniteMetricSpace& space = realization.space;
  exhaustion.validate(iota_ids(space.size()));
  const int n = samples.complex().dimension();
  const std::size_t N = static_cast<std::size_t>(2 * n + 1);

  IterativeEmbedding out;
  const auto height = proper_height(exhaustion, space);
  out.initial = PointCloud(samples.size(), N);
  for (PointId x = 0; x < samples.size(); ++x) {
    out.initial(x, 0) = height[x] / K;
    for (std::size_t k = 1; k < N; ++k) {
      out.initial(x, k) = k - 1 < realization.positions.dim() ? realization.positions(x, k - 1) : 0.0;
    }
  }

  EmbeddingCertificate& cert = out.certificate;
  cert.method = "embed_iterative";
  cert.target_dim = N;
  cert.initial_equal_image_pairs = equal_image_pairs(out.initial);
  PointCloud current = out.initial;
  std::size_t previous_pairs = cert.initial_equal_image_pairs;
  for (int k = 1; k <= K; ++k) {
    StepSummary summary;
    summary.k = static_cast<std::size_t>(k);
    summary.stage = static_cast<std::size_t>(k - 1) % exhaustion.size();
    summary.eps = 1.0 / k;
    summary.r = std::ldexp(1.0, -(k + 1));
    cert.rho_budget += summary.r;
    auto step = perturb_step(current, samples, space, exhaustion.stages[summary.stage], summary.eps, summary.r,
                             mix_seed(seed ^ mix_seed(static_cast<std::uint64_t>(k))));
    summary.report = step.report;
    summary.equal_image_pairs = equal_image_pairs(step.g);
    if (summary.equal_image_pairs > previous_pairs) cert.equal_pairs_nonincreasing = false;
    previous_pairs = summary.equal_image_pairs;
    if (step.report.status != "ok") cert.failures.push_back("step " + std::to_string(k) + " missed its postconditions");
    if (step.report.rho > summary.r) cert.failures.push_back("step " + std::to_string(k) + " moved the map by more than r");
    current = std::move(step.g);
    cert.steps.push_back(std::move(summary));
  }
  out.final_map = current;
  cert.rho_total = rho_metric(out.initial, out.final_map, iota_ids(samples.size())).value;
  if (!(cert.rho_budget < 1.0)) cert.failures.push_back("perturbation budget reached 1");
  if (!(cert.rho_total <= cert.rho_budget)) cert.failures.push_back("total displacement exceeds the budget");

  PointCloud vertex_images(samples.complex().vertex_count(), N);
  const auto vs = samples.vertex_samples();
  for (PointId v = 0; v < vs.size(); ++v) {
    for (std::size_t k = 0; k < N; ++k) vertex_images(v, k) = out.final_map(vs[v], k);
  }
  out.vertex_map = PLMap(samples.complex_ptr(), std::move(vertex_images));
  check_simplex_pairs(out.vertex_map, cert);
  injectivity_margin(out.final_map, space, 1.0 / K, cert);
  cert.properness = escapes_to_infinity(out.final_map, exhaustion, default_ladder(out.final_map));
  finish(cert);
  return out;
}

PLEmbedding pl_embed(std::shared_ptr<const SimplicialComplex> complex, std::uint64_t seed,
                     std::optional<std::size_t> force_dim, double mesh) {
  if (!complex) throw ContractError("null complex");
  complex->validate();
  const std::size_t N = force_dim.value_or(static_cast<std::size_t>(2 * complex->dimension() + 1));
  if (N < 1) throw ContractError("target dimension must be positive");
  std::vector<Point> start(complex->vertex_count(), Point(N, 0.0));
  for (std::size_t v = 0; v < start.size(); ++v) start[v][0] = static_cast<double>(v);
  const PerturbResult z = perturb_to_general_position(start, 1.0, seed);
  PointCloud images(start.size(), N);
  for (std::size_t v = 0; v < start.size(); ++v) images.set_point(v, z.points[v]);

  PLEmbedding out;
  out.map = PLMap(complex, std::move(images));
  EmbeddingCertificate& cert = out.certificate;
  cert.method = "pl_embed";
  cert.target_dim = N;
  check_simplex_pairs(out.map, cert);
  const Realization real = realize_metric(complex, standard_simplex_coords(*complex), mesh);
  injectivity_margin(out.map.on_samples(real.samples), real.space, 0.0, cert);
  cert.continuum_injective = cert.failures.empty();
  finish(cert);
  return out;
}

}  // namespace topembed
