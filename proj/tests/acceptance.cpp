// One line per acceptance criterion; exit status 1 when any criterion fails.
#include <gmpxx.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "topembed/covers.hpp"
#include "topembed/embed.hpp"
#include "topembed/error.hpp"
#include "topembed/exact.hpp"
#include "topembed/geometry.hpp"
#include "topembed/io.hpp"
#include "topembed/maps.hpp"
#include "topembed/subdivision.hpp"

using namespace topembed;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string data(const std::string& name) { return std::string(TOPEMBED_DATA_DIR) + "/" + name; }

std::shared_ptr<const SimplicialComplex> load(const std::string& name) {
  return std::make_shared<const SimplicialComplex>(io::complex_from_json(io::read_json(data(name))));
}

int count_order(const Cover& c) {
  std::vector<int> hits(c.ground.empty() ? 0 : c.ground.back() + 1, 0);
  for (const auto& s : c.sets) {
    for (PointId x : s) ++hits[x];
  }
  int best = -1;
  for (PointId x : c.ground) best = std::max(best, hits[x] - 1);
  return best;
}

int count_order_in(const Cover& c, const IdSet& region) {
  int best = -1;
  for (PointId x : region) {
    int hits = 0;
    for (const auto& s : c.sets) hits += contains(s, x);
    best = std::max(best, hits - 1);
  }
  return best;
}

bool subset_refines(const Cover& v, const Cover& u) {
  for (const auto& a : v.sets) {
    bool inside = false;
    for (const auto& b : u.sets) inside = inside || is_subset(a, b);
    if (!inside) return false;
  }
  return true;
}

// Rank of the rows (1, p) by plain Gaussian elimination over Q.
std::size_t rational_rank(const std::vector<Point>& pts) {
  if (pts.empty()) return 0;
  const std::size_t cols = pts[0].size() + 1;
  std::vector<std::vector<mpq_class>> m;
  for (const auto& p : pts) {
    std::vector<mpq_class> row{1};
    for (double v : p) row.push_back(exact_dyadic(v));
    m.push_back(row);
  }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < m.size() && m[pivot][c] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[pivot], m[rank]);
    for (std::size_t r = rank + 1; r < m.size(); ++r) {
      if (m[r][c] == 0) continue;
      const mpq_class factor = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= factor * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

bool all_subsets_independent(const std::vector<Point>& pts) {
  const std::size_t dim = pts.empty() ? 0 : pts[0].size();
  const std::size_t top = std::min(pts.size(), dim + 1);
  for (std::size_t k = 2; k <= top; ++k) {
    bool ok = true;
    for_each_combination(pts.size(), k, [&](const std::vector<std::size_t>& idx) {
      std::vector<Point> sub;
      for (auto i : idx) sub.push_back(pts[i]);
      ok = rational_rank(sub) == k;
      return ok;
    });
    if (!ok) return false;
  }
  return true;
}

double sup_dist(const PointCloud& f, PointId x, PointId y) {
  double d = 0.0;
  for (std::size_t k = 0; k < f.dim(); ++k) d = std::max(d, std::abs(f(x, k) - f(y, k)));
  return d;
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& o) {
  for (int n : {1, 2, 3}) {
    CubeCoverSpec spec{n, 3.0, std::vector<double>(n, -2.0), std::vector<double>(n, 2.0), 0.1};
    const CubeCover cube = cube_cover(spec);
    const int ord = count_order(cube.cover);
    double max_diam = 0.0;
    for (double d : cube.diameter) max_diam = std::max(max_diam, d);
    o.require(ord == n, "order for n=" + std::to_string(n));
    o.require(cube.diameters_exact_within && max_diam <= 1.5, "diameter bound for n=" + std::to_string(n));
    o.detail << "n=" << n << " order " << ord << " max diam " << max_diam << "; ";
    if (ord != n) {
      // top order needs n distinct positive fractional parts below 1/4
      spec.pitch = 0.05;
      o.detail << "(pitch 0.05 gives order " << count_order(cube_cover(spec).cover) << ") ";
    }
  }
}

void criterion2(Outcome& o) {
  // sampled unit interval at pitch 1/100
  const std::size_t N = 101;
  IdSet left, right;
  for (PointId i = 0; i < N; ++i) {
    if (i < 100) left.push_back(i);
    if (i > 0) right.push_back(i);
  }
  const Cover u = Cover::make(iota_ids(N), {left, right}, {"[0,1)", "(0,1]"});
  o.require(order(u) == 1 && count_order(u) == 1, "two half-open intervals have order 1");

  // J_k = ((k-1) lambda/4, (k+1) lambda/4) with lambda = 1/2, compared exactly
  std::vector<IdSet> js;
  for (int k = 0; k <= 9; ++k) {
    IdSet j;
    for (PointId i = 0; i < N; ++i) {
      if (8 * static_cast<int>(i) > 100 * (k - 1) && 8 * static_cast<int>(i) < 100 * (k + 1)) j.push_back(i);
    }
    if (!j.empty()) js.push_back(j);
  }
  const Cover v = Cover::make(iota_ids(N), js);
  o.require(count_order(v) == 1, "J_k order 1");
  o.require(refines(v, u).refines && subset_refines(v, u), "J_k refines");

  // Path with 12 vertices and 11 edges as a finite space: a vertex lies in an
  // open set only together with its incident edges. Cells 0..11 are vertices,
  // 12..22 edges (edge e joins e-12 and e-11).
  const std::size_t V = 12, cells = 23;
  auto up_pairs = std::vector<std::pair<std::size_t, std::size_t>>();
  for (std::size_t e = 0; e + 1 < V; ++e) {
    up_pairs.push_back({e, V + e});
    up_pairs.push_back({e + 1, V + e});
  }
  // the surrogate of {[0,1), (0,1]}: everything but the last vertex, everything but the first
  auto fits = [&](const std::vector<int>& block_of, int b) {
    bool has_first = false, has_last = false;
    for (std::size_t c = 0; c < cells; ++c) {
      if (block_of[c] == b) {
        has_first = has_first || c == 0;
        has_last = has_last || c == V - 1;
      }
    }
    return !(has_first && has_last);
  };
  auto search = [&](bool respect_topology, std::size_t& nodes) {
    std::size_t found = 0;
    std::vector<int> block_of(cells, -1);
    std::function<void(std::size_t, int)> dfs = [&](std::size_t c, int used) {
      ++nodes;
      if (c == cells) {
        if (used < 2) return;
        for (int b = 0; b < used; ++b) {
          if (!fits(block_of, b)) return;
        }
        ++found;
        return;
      }
      for (int b = 0; b <= std::min(used, 3); ++b) {
        block_of[c] = b;
        bool ok = true;
        if (respect_topology) {
          for (auto [lo, hi] : up_pairs) {
            if (block_of[lo] >= 0 && block_of[hi] >= 0 && block_of[lo] != block_of[hi]) ok = false;
          }
        }
        if (ok) dfs(c + 1, std::max(used, b + 1));
      }
      block_of[c] = -1;
    };
    dfs(0, 0);
    return found;
  };
  std::size_t nodes = 0;
  const std::size_t found = search(true, nodes);
  o.require(found == 0, "no order-0 refinement of the path surrogate");
  // control: dropping the open-set constraint admits a separating partition
  std::vector<int> split(cells, 0);
  split[V - 1] = 1;
  const std::size_t control_found = fits(split, 0) && fits(split, 1) ? 1 : 0;
  o.require(control_found == 1, "discrete control partition");
  o.detail << "interval order 1, J_k order " << count_order(v) << " refines; path search nodes " << nodes
           << ", order-0 covers found " << found << "; ";
}

void criterion3(Outcome& o) {
  std::mt19937_64 rng(3);
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const std::size_t k = 1 + rng() % 8;
    std::vector<IdSet> sets(k);
    for (PointId x = 0; x < n; ++x) {
      sets[rng() % k].push_back(x);
      for (auto& s : sets) {
        if (rng() % 4 == 0) s.push_back(x);
      }
    }
    std::vector<IdSet> kept;
    for (auto& s : sets) {
      if (!s.empty()) kept.push_back(make_id_set(s));
    }
    const Cover a1 = Cover::make(iota_ids(n), kept);
    std::vector<IdSet> parts;
    for (const auto& s : a1.sets) {
      IdSet p, q;
      for (PointId x : s) (rng() % 2 ? p : q).push_back(x);
      if (!p.empty()) parts.push_back(p);
      if (!q.empty()) parts.push_back(q);
    }
    const Cover a2 = Cover::make(iota_ids(n), parts);
    IdSet x1, x2;
    for (PointId x = 0; x < n; ++x) {
      const auto r = rng() % 3;
      if (r != 1) x1.push_back(x);
      if (r != 0) x2.push_back(x);
    }
    const Cover m = merge_refinements(a1, a2, x1, x2);
    const int bound = std::max(count_order_in(a1, x1), count_order_in(a2, x2));
    if (!subset_refines(m, a1) || count_order(m) > bound) ++failures;
  }
  o.require(failures == 0, "merge bound");
  o.detail << "200 instances, " << failures << " failures; ";
}

void criterion4(Outcome& o) {
  auto path = load("path12.json");
  const Realization real = realize_metric(path, io::vertex_coords(*path, io::read_points_csv(data("path12_coords.csv"))), 0.25);
  const std::size_t n = real.samples.size();
  const Cover stars = star_cover(real.samples, 1, iota_ids(n));
  std::mt19937_64 rng(4);
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + rng() % 6;
    std::vector<IdSet> sets(k);
    for (PointId x = 0; x < n; ++x) {
      sets[rng() % k].push_back(x);
      for (auto& s : sets) {
        if (rng() % 5 == 0) s.push_back(x);
      }
    }
    std::vector<IdSet> kept;
    for (auto& s : sets) {
      if (!s.empty()) kept.push_back(make_id_set(s));
    }
    const Cover u = Cover::make(iota_ids(n), kept);
    const Exhaustion ex = build_exhaustion(real.space, 1 + static_cast<int>(rng() % 5));
    const auto result = staged_cover(u, ex, split_refiner(stars), 1);
    bool witnessed = result.witness.size() == result.cover.size();
    for (std::size_t i = 0; witnessed && i < result.cover.size(); ++i) {
      witnessed = result.witness[i] && is_subset(result.cover.sets[i], u.sets[*result.witness[i]]);
    }
    if (count_order(result.cover) > 1 || !witnessed) ++failures;
  }
  o.require(failures == 0, "staged order and witness");
  bool caught = false;
  try {
    const Cover heavy = Cover::make(iota_ids(n), {iota_ids(n), iota_ids(n), iota_ids(n)});
    staged_cover(heavy, build_exhaustion(real.space, 3),
                 [](const Cover& target, const IdSet&, std::size_t) { return target; }, 1);
  } catch (const ContractError&) {
    caught = true;
  }
  o.require(caught, "adversarial refiner rejected");
  o.detail << "50 instances on " << n << " samples, " << failures << " failures; adversarial refiner "
           << (caught ? "rejected" : "accepted") << "; ";
}

void criterion5(Outcome& o) {
  int failures = 0, runs = 0;
  std::size_t redraws = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t N = 1 + seed % 5;
    const std::size_t count = 2 + seed % 11;
    // degenerate input: integer points on a coarse lattice line
    std::vector<Point> pts(count, Point(N, 0.0));
    for (std::size_t i = 0; i < count; ++i) pts[i][0] = static_cast<double>(rng() % 3);
    for (double r : {0.1, 0.01}) {
      const auto result = perturb_to_general_position(pts, r, seed);
      redraws += result.redraws;
      const mpq_class bound = decimal_rational(r);
      bool within = true;
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t k = 0; k < N; ++k) {
          within = within && abs(exact_dyadic(result.points[i][k]) - exact_dyadic(pts[i][k])) < bound;
        }
      }
      if (!within || !all_subsets_independent(result.points)) ++failures;
      ++runs;
    }
  }
  o.require(failures == 0, "general position");
  o.detail << runs << " runs, " << failures << " failures, " << redraws << " redraws; ";
}

void criterion6(Outcome& o) {
  auto hex = load("hexagon.json");
  const Realization real = realize_metric(hex, io::vertex_coords(*hex, io::read_points_csv(data("hexagon_coords.csv"))), 0.25);
  const std::size_t n = real.samples.size();
  PointCloud f(n, 3);
  for (std::size_t i = 0; i < n; ++i) f(i, 0) = real.positions(i, 0);
  const auto step = perturb_step(f, real.samples, real.space, iota_ids(n), 0.2, 0.9, 0);
  // rho on samples, in exact arithmetic
  bool rho_ok = true;
  const mpq_class r = decimal_rational(0.9);
  for (PointId x = 0; x < n; ++x) {
    for (std::size_t k = 0; k < 3; ++k) rho_ok = rho_ok && abs(exact_dyadic(step.g(x, k)) - exact_dyadic(f(x, k))) <= r;
  }
  double delta = 0.0;
  for (PointId x = 0; x < n; ++x) {
    for (PointId y = 0; y < n; ++y) {
      if (sup_dist(step.g, x, y) <= kFiberTau) delta = std::max(delta, real.space(x, y));
    }
  }
  // weight vectors agree on near-coincident image pairs
  double worst = 0.0;
  std::size_t pairs = 0;
  for (PointId x = 0; x < n; ++x) {
    for (PointId y = x + 1; y < n; ++y) {
      if (sup_dist(step.g_tilde, x, y) > kFiberTau) continue;
      ++pairs;
      const auto wx = step.weights.dense(x), wy = step.weights.dense(y);
      for (std::size_t i = 0; i < wx.size(); ++i) worst = std::max(worst, std::abs(wx[i] - wy[i]));
    }
  }
  o.require(rho_ok && step.report.rho <= 0.9, "rho within r");
  o.require(delta < 0.2, "fiber diameter below eps");
  o.require(worst <= 1e-6 && step.report.claim2_max_weight_diff <= 1e-6, "weight agreement");
  o.require(step.report.status == "ok", "step status");
  o.detail << n << " samples, rho " << step.report.rho << ", delta " << step.report.delta_before_tau << " -> " << delta
           << ", " << pairs << " near pairs, max weight diff " << worst << "; ";
}

void criterion7(Outcome& o) {
  struct Case {
    const char* file;
    std::size_t dim;
  };
  for (const Case& c : {Case{"k5.json", 3}, Case{"torus7.json", 5}, Case{"rp2_6.json", 5}}) {
    auto complex = load(c.file);
    const auto result = pl_embed(complex, 0);
    const auto& simplices = complex->simplices();
    std::size_t disjoint_vertex_pairs = 0, clean = 0, edge_pairs = 0;
    for (std::size_t a = 0; a < simplices.size(); ++a) {
      for (std::size_t b = a + 1; b < simplices.size(); ++b) {
        std::vector<Point> sa, sb;
        for (PointId v : simplices[a]) sa.push_back(result.map.image(v));
        for (PointId v : simplices[b]) sb.push_back(result.map.image(v));
        const Intersection got = simplices_disjoint(sa, sb);
        if (!intersects(simplices[a], simplices[b])) {
          ++disjoint_vertex_pairs;
          if (simplices[a].size() == 2 && simplices[b].size() == 2) ++edge_pairs;
          clean += got == Intersection::disjoint;
        } else {
          clean += got == Intersection::intersect_in_common_face;
        }
      }
    }
    const std::size_t all_pairs = simplices.size() * (simplices.size() - 1) / 2;
    std::vector<Point> verts;
    for (PointId v = 0; v < complex->vertex_count(); ++v) verts.push_back(result.map.image(v));
    o.require(result.certificate.passed && result.map.target_dim() == c.dim, std::string(c.file) + " certificate");
    o.require(clean == all_pairs, std::string(c.file) + " pair oracle");
    o.require(all_subsets_independent(verts), std::string(c.file) + " vertex general position");
    if (std::string(c.file) == "k5.json") o.require(edge_pairs == 15, "K5 has 15 disjoint edge pairs");
    o.detail << c.file << " R^" << c.dim << " " << clean << "/" << all_pairs << " pairs clean; ";
  }
  auto k5 = load("k5.json");
  int crossing = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto result = pl_embed(k5, seed, 2);
    bool concrete = false;
    for (const auto& p : result.certificate.improper_pairs) {
      std::vector<Point> sa, sb;
      for (PointId v : k5->simplices()[p.first]) sa.push_back(result.map.image(v));
      for (PointId v : k5->simplices()[p.second]) sb.push_back(result.map.image(v));
      concrete = concrete || simplices_disjoint(sa, sb) == Intersection::intersect_improperly;
    }
    crossing += !result.certificate.passed && concrete;
  }
  o.require(crossing == 20, "K5 in the plane fails every seed");
  o.detail << "K5 in R^2 fails " << crossing << "/20 seeds; ";
}

void criterion8(Outcome& o) {
  auto hex = load("hexagon.json");
  auto torus = load("torus7.json");
  const Realization hreal =
      realize_metric(hex, io::vertex_coords(*hex, io::read_points_csv(data("hexagon_coords.csv"))), 0.25);
  const Realization treal = realize_metric(torus, standard_simplex_coords(*torus), 0.25);
  for (const auto* real : {&hreal, &treal}) {
    const auto result = embed_iterative(*real, build_exhaustion(real->space, 6), 6, 0);
    const auto& cert = result.certificate;
    mpq_class budget = 0;
    bool rho_ok = true;
    std::size_t previous = cert.initial_equal_image_pairs;
    bool monotone = true;
    for (const auto& s : cert.steps) {
      budget += exact_dyadic(s.r);
      rho_ok = rho_ok && s.report.rho <= s.r;
      monotone = monotone && s.equal_image_pairs <= previous;
      previous = s.equal_image_pairs;
    }
    const std::string name = real->samples.complex().vertex_count() == 6 ? "hexagon" : "torus";
    o.require(cert.steps.size() == 6 && budget == mpq_class(63, 128) && budget < 1, name + " rho budget");
    o.require(rho_ok, name + " per-step rho");
    o.require(monotone, name + " equal-image pairs nonincreasing");
    o.require(cert.resolution == 1.0 / 6 && cert.injectivity_margin > 0.0, name + " margin");
    o.require(cert.passed, name + " certificate");
    o.detail << name << " margin " << cert.injectivity_margin << " budget " << budget.get_str() << " pairs "
             << cert.initial_equal_image_pairs << "->" << previous << "; ";
  }
}

void criterion9(Outcome& o) {
  const std::size_t n = 200;
  PointCloud line(n, 1);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    line(i, 0) = static_cast<double>(i) / (n - 1);
    ids.push_back("x" + std::to_string(i));
  }
  const auto space = FiniteMetricSpace::from_coordinates(ids, line);
  // stages grow away from x0; only the first nine are used so points stay outside
  const Exhaustion full = build_exhaustion(space, 10);
  const auto height = proper_height(full, space);
  Exhaustion partial{std::vector<IdSet>(full.stages.begin(), full.stages.end() - 1)};

  bool minima = true;
  double previous = -1.0;
  for (std::size_t k = 0; k < full.size(); ++k) {
    double mn = std::numeric_limits<double>::infinity();
    for (PointId x : set_difference(iota_ids(n), k ? full.stage(k - 1) : IdSet{})) mn = std::min(mn, height[x]);
    minima = minima && mn >= previous;
    previous = mn;
  }
  o.require(minima, "stage minima nondecreasing");

  PointCloud f(n, 1);
  for (PointId x = 0; x < n; ++x) f(x, 0) = height[x];
  const std::vector<double> ladder{2, 3, 4, 5, 6, 7, 8};
  const auto base = escapes_to_infinity(f, partial, ladder);
  o.require(base.escapes, "height escapes");

  bool containment = true;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!base.witness_stage[i]) continue;
    for (PointId x = 0; x < n; ++x) {
      if (std::abs(f(x, 0)) <= ladder[i]) containment = containment && contains(partial.stage(*base.witness_stage[i]), x);
    }
  }
  o.require(containment, "box preimage inside witnessing stage");

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.999, 0.999);
  std::vector<double> lowered;
  for (double R : ladder) lowered.push_back(R - 1);
  int preserved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    PointCloud g = f;
    for (PointId x = 0; x < n; ++x) g(x, 0) += u(rng);
    if (!(rho_metric(f, g, iota_ids(n)).value < 1.0)) continue;
    const auto shifted = escapes_to_infinity(g, partial, lowered);
    bool same_stages = shifted.escapes;
    for (std::size_t i = 0; same_stages && i < ladder.size(); ++i) {
      same_stages = shifted.witness_stage[i] && *shifted.witness_stage[i] <= *base.witness_stage[i];
    }
    preserved += same_stages;
  }
  o.require(preserved == 100, "ladder preserved under rho < 1");
  o.detail << "200 samples, 10 stages, minima nondecreasing, " << preserved << "/100 perturbations keep the ladder; ";
}

void criterion10(Outcome& o) {
  for (const char* name : {"segment.json", "hexagon.json", "k5.json", "torus7.json", "rp2_6.json"}) {
    auto c = load(name);
    const Realization real = realize_metric(c, standard_simplex_coords(*c), 0.25);
    const auto m = std::max(real.samples.resolution(), chain_resolution(c->dimension()));
    const int bound = dimension_upper_bound(*c, SampleSet(c, m, 0.25), 1);
    o.require(bound <= c->dimension(), std::string(name) + " bound");
    o.detail << name << " " << bound << "<=" << c->dimension() << "; ";
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit_seconds;
    void (*run)(Outcome&);
  };
  const std::vector<Criterion> criteria = {
      {1, 30, criterion1},  {2, 10, criterion2},  {3, 10, criterion3}, {4, 10, criterion4},
      {5, 60, criterion5},  {6, 30, criterion6},  {7, 120, criterion7}, {8, 120, criterion8},
      {9, 10, criterion9},  {10, 10, criterion10},
  };
  bool all = true;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(seconds < c.limit_seconds, "runtime limit " + std::to_string(c.limit_seconds) + " s");
    all = all && o.pass;
    std::printf("criterion %d: %s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", seconds, o.detail.str().c_str());
  }
  return all ? 0 : 1;
}
