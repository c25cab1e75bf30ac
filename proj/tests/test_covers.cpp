#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "topembed/covers.hpp"
#include "topembed/error.hpp"

using namespace topembed;

namespace {

// Unit interval sampled at pitch 1/100 with {[0,1), (0,1]}.
Cover interval_cover() {
  IdSet left, right;
  for (PointId i = 0; i <= 100; ++i) {
    if (i < 100) left.push_back(i);
    if (i > 0) right.push_back(i);
  }
  return Cover::make(iota_ids(101), {left, right}, {"[0,1)", "(0,1]"});
}

// Open stars of every other point of a sampled path: order 1.
Cover path_stars(std::size_t n) {
  std::vector<IdSet> sets;
  for (std::size_t v = 0; v < n; v += 2) {
    IdSet s;
    for (long d = -1; d <= 1; ++d) {
      const long x = static_cast<long>(v) + d;
      if (x >= 0 && x < static_cast<long>(n)) s.push_back(static_cast<PointId>(x));
    }
    sets.push_back(s);
  }
  return Cover::make(iota_ids(n), std::move(sets));
}

double probe_witness_margin(const UnitCell& cell, const std::vector<double>& y) {
  double a = 0.0;
  double bound = 0.25;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (cell.interval[i]) {
      bound = std::min({bound, y[i] - cell.k[i], cell.k[i] + 1 - y[i]});
    } else {
      a = std::max(a, std::abs(y[i] - cell.k[i]));
    }
  }
  return bound - a;
}

// Searches points x of the cell on a lattice of step h for |y - x| < eps(x)/2,
// eps(x) = min(1/2, distance of each non-integer coordinate to Z).
bool brute_member(const UnitCell& cell, const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<std::vector<double>> axis(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!cell.interval[i]) {
      axis[i] = {static_cast<double>(cell.k[i])};
    } else {
      for (double t = h; t < 1.0 - h / 2; t += h) axis[i].push_back(cell.k[i] + t);
    }
  }
  std::vector<std::size_t> pick(n, 0);
  while (true) {
    double eps = 0.5;
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = axis[i][pick[i]];
      if (cell.interval[i]) eps = std::min(eps, std::min(x - std::floor(x), std::ceil(x) - x));
      dist = std::max(dist, std::abs(y[i] - x));
    }
    if (dist < eps / 2) return true;
    std::size_t i = 0;
    while (i < n && ++pick[i] == axis[i].size()) pick[i++] = 0;
    if (i == n) return false;
  }
}

}  // namespace

TEST_SUITE("covers") {
  TEST_CASE("two half-open intervals have order 1") {
    const Cover c = interval_cover();
    CHECK(order(c) == 1);
    CHECK(order_in(c, {0}) == 0);
    CHECK_FALSE(order_in(c, {}).has_value());
    CHECK_THROWS_AS(order_in(c, {200}), ContractError);
  }

  TEST_CASE("cover validation") {
    CHECK_THROWS_AS(Cover::make({0, 1, 2}, {{0, 1}}).validate(), ContractError);
    CHECK_THROWS_AS(Cover::make({0, 1}, {{0, 1}, {}}).validate(), ContractError);
    CHECK_THROWS_AS(Cover::make({0, 1}, {{0, 1, 5}}).validate(), ContractError);
  }

  TEST_CASE("order and refinement agree with direct counting") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + rng() % 25;
      const Cover a = testing::random_cover(rng, n, 7);
      const Cover b = testing::random_cover(rng, n, 7);
      CHECK(order(a) == testing::brute_order(a));
      const auto r = refines(a, b);
      CHECK(r.refines == testing::brute_refines(a, b));
      if (r.refines) {
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(is_subset(a.sets[i], b.sets[*r.witness[i]]));
      } else {
        CHECK(r.offending.has_value());
      }
    }
  }

  TEST_CASE("restricting a cover never raises its order") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng() % 20;
      const Cover a = testing::random_cover(rng, n, 8);
      IdSet y;
      for (PointId x = 0; x < n; ++x) {
        if (rng() % 2) y.push_back(x);
      }
      if (y.empty()) continue;
      std::vector<IdSet> restricted;
      for (const auto& s : a.sets) {
        auto r = set_intersection(s, y);
        if (!r.empty()) restricted.push_back(std::move(r));
      }
      CHECK(order(Cover::make(y, restricted)) <= order(a));
    }
  }

  TEST_CASE("lebesgue number guarantee holds for every small subset") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 8; ++trial) {
      const std::size_t n = 8 + trial;
      const auto space = testing::random_plane_space(rng, n);
      const Cover c = testing::random_cover(rng, n, 5);
      const double lambda = lebesgue_number(c, space);
      CHECK(lambda > 0.0);
      for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        IdSet s;
        for (PointId x = 0; x < n; ++x) {
          if (mask & (1u << x)) s.push_back(x);
        }
        if (!(space.diameter_of(s) < lambda)) continue;
        bool inside = false;
        for (const auto& set : c.sets) inside = inside || is_subset(s, set);
        CHECK(inside);
      }
    }
  }

  TEST_CASE("cube cover on the line") {
    const CubeCover cube = cube_cover({1, 3.0, {-2.0}, {2.0}, 0.1});
    CHECK(cube.grid.size() == 41);
    CHECK(order(cube.cover) == 1);
    CHECK(cube.diameters_exact_within);
    for (double d : cube.diameter) CHECK(d <= 1.5);
  }

  TEST_CASE("cube cover on the square has order 2 and disjoint strata") {
    const CubeCover cube = cube_cover({2, 3.0, {0.0, 0.0}, {2.0, 2.0}, 0.1});
    CHECK(order(cube.cover) == 2);
    CHECK(testing::brute_order(cube.cover) == 2);
    for (std::size_t a = 0; a < cube.cover.size(); ++a) {
      for (std::size_t b = a + 1; b < cube.cover.size(); ++b) {
        if (cube.stratum[a] == cube.stratum[b]) CHECK_FALSE(intersects(cube.cover.sets[a], cube.cover.sets[b]));
      }
    }
  }

  TEST_CASE("cube cover rejects a coarse pitch") {
    CHECK_THROWS_AS(cube_cover({1, 3.0, {0.0}, {1.0}, 0.2}), ContractError);
    CHECK_NOTHROW(cube_cover({1, 3.0, {0.0}, {1.0}, 0.125}));
  }

  TEST_CASE("membership closed form agrees with a brute-force witness search") {
    const double h = 1.0 / 64;
    std::size_t near_boundary = 0;
    for (int n : {1, 2}) {
      std::vector<double> y(static_cast<std::size_t>(n));
      const int steps = 4 * 10;  // probe pitch 1/40 in scaled units
      const std::size_t total = static_cast<std::size_t>(std::pow(steps + 1, n));
      for (std::size_t p = 0; p < total; ++p) {
        std::size_t rest = p;
        for (auto& v : y) {
          v = -0.5 + static_cast<double>(rest % (steps + 1)) / steps * 2.0;
          rest /= steps + 1;
        }
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
          UnitCell cell{std::vector<long>(y.size()), std::vector<bool>(y.size())};
          for (std::size_t i = 0; i < y.size(); ++i) {
            cell.interval[i] = (mask >> i) & 1u;
            cell.k[i] = cell.interval[i] ? static_cast<long>(std::floor(y[i])) : std::lround(y[i]);
          }
          const bool closed = in_cell_neighbourhood(cell, y);
          const bool brute = brute_member(cell, y, h);
          if (brute) CHECK(closed);
          if (closed && !brute) {
            CHECK(probe_witness_margin(cell, y) <= h);
            ++near_boundary;
          }
        }
      }
    }
    MESSAGE("probes decided only within one witness step: " << near_boundary);
  }

  TEST_CASE("merging identical covers returns the same sets") {
    const Cover c = interval_cover();
    const Cover m = merge_refinements(c, c, iota_ids(50), set_difference(iota_ids(101), iota_ids(50)));
    CHECK(m.sets == c.sets);
  }

  TEST_CASE("merging two halves of the interval keeps order 1") {
    const Cover u = interval_cover();
    const Cover stars = path_stars(101);
    const Cover fine = split_refiner(stars)(u, {}, 0);
    const IdSet left = iota_ids(51);
    const IdSet right = set_difference(iota_ids(101), iota_ids(50));
    const Cover m = merge_refinements(u, fine, left, right);
    CHECK(order(m) <= 1);
    CHECK(refines(m, u).refines);
  }

  TEST_CASE("merge order bound on random instances") {
    std::mt19937_64 rng(14);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng() % 29;
      const Cover a1 = testing::random_cover(rng, n, 8);
      // a2: split each a1 set at random, which refines a1
      std::vector<IdSet> parts;
      for (const auto& s : a1.sets) {
        IdSet p, q;
        for (PointId x : s) (rng() % 2 ? p : q).push_back(x);
        if (!p.empty()) parts.push_back(p);
        if (!q.empty()) parts.push_back(q);
      }
      const Cover a2 = Cover::make(a1.ground, parts);
      IdSet x1, x2;
      for (PointId x = 0; x < n; ++x) {
        const auto r = rng() % 3;
        if (r != 1) x1.push_back(x);
        if (r != 0) x2.push_back(x);
      }
      const Cover m = merge_refinements(a1, a2, x1, x2);
      CHECK(testing::brute_refines(m, a1));
      const int bound = std::max(testing::brute_order_in(a1, x1), testing::brute_order_in(a2, x2));
      CHECK(testing::brute_order(m) <= bound);
      ++checked;
    }
    CHECK(checked == 200);
  }

  TEST_CASE("merge rejects a non-refining second cover") {
    const Cover c = interval_cover();
    const Cover whole = Cover::make(iota_ids(101), {iota_ids(101)});
    CHECK_THROWS_AS(merge_refinements(c, whole, iota_ids(101), {}), ContractError);
    CHECK_THROWS_AS(merge_refinements(c, c, iota_ids(10), {}), ContractError);
  }

  TEST_CASE("single-stage staged cover is one refiner call") {
    const auto space = testing::line_space(101);
    const Exhaustion ex = build_exhaustion(space, 1);
    const auto result = staged_cover(interval_cover(), ex, split_refiner(path_stars(101)), 1);
    CHECK(result.refiner_calls == 1);
    CHECK(order(result.cover) <= 1);
    CHECK(refines(result.cover, interval_cover()).refines);
  }

  TEST_CASE("three-stage sampled interval with star refiner") {
    const auto space = testing::line_space(101);
    const Exhaustion ex = build_exhaustion(space, 3);
    const auto result = staged_cover(interval_cover(), ex, split_refiner(path_stars(101)), 1);
    CHECK(testing::brute_order(result.cover) <= 1);
    CHECK(testing::brute_refines(result.cover, interval_cover()));
    for (std::size_t i = 0; i < result.cover.size(); ++i) {
      CHECK(is_subset(result.cover.sets[i], interval_cover().sets[*result.witness[i]]));
    }
  }

  TEST_CASE("staged cover on random instances") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 4 + rng() % 27;
      const auto space = testing::line_space(n);
      const Cover u = testing::random_cover(rng, n, 6);
      const Exhaustion ex = build_exhaustion(space, 1 + static_cast<int>(rng() % 5));
      const int d = static_cast<int>(rng() % 2) + 1;
      const auto result = staged_cover(u, ex, split_refiner(path_stars(n)), d);
      CHECK(testing::brute_order(result.cover) <= d);
      CHECK(testing::brute_refines(result.cover, u));
    }
  }

  TEST_CASE("a refiner that returns its target is caught") {
    const auto space = testing::line_space(30);
    const Exhaustion ex = build_exhaustion(space, 3);
    std::vector<IdSet> heavy(3, iota_ids(30));
    const Cover u = Cover::make(iota_ids(30), heavy);
    Refiner echo = [](const Cover& target, const IdSet&, std::size_t) { return target; };
    try {
      staged_cover(u, ex, echo, 1);
      FAIL("expected a contract error");
    } catch (const ContractError& e) {
      CHECK(std::string(e.what()).find("stage 1") != std::string::npos);
    }
    Refiner coarse = [](const Cover& target, const IdSet&, std::size_t) {
      return Cover::make(target.ground, {target.ground});
    };
    CHECK_THROWS_AS(staged_cover(interval_cover(), build_exhaustion(testing::line_space(101), 2), coarse, 1),
                    ContractError);
  }

  TEST_CASE("kept sets do not pile up across stages") {
    // Ten points, C_1 = {0..3}, a cover set spanning everything. The literal
    // three-type rule keeps that set beside the fresh ones and reaches order 1
    // with d = 0; the staged construction must stay at order 0.
    const FiniteMetricSpace space = testing::line_space(10);
    Exhaustion ex{{{0, 1, 2, 3}, iota_ids(10)}};
    const Cover u = Cover::make(iota_ids(10), {iota_ids(10)});
    std::vector<IdSet> singles;
    for (PointId x = 0; x < 10; ++x) singles.push_back({x});
    const auto result = staged_cover(u, ex, split_refiner(Cover::make(iota_ids(10), singles)), 0);
    CHECK(order(result.cover) == 0);
  }
}
