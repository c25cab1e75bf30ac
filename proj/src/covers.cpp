#include "topembed/covers.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "topembed/error.hpp"
#include "topembed/exact.hpp"
#include "topembed/kernels.hpp"

namespace topembed {

Cover Cover::make(IdSet ground, std::vector<IdSet> sets, std::vector<std::string> labels) {
  Cover c;
  c.ground = make_id_set(std::move(ground));
  for (auto& s : sets) c.sets.push_back(make_id_set(std::move(s)));
  labels.resize(c.sets.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) labels[i] = "U" + std::to_string(i);
  }
  c.labels = std::move(labels);
  return c;
}

void Cover::validate() const {
  if (labels.size() != sets.size()) throw ContractError("cover labels and sets differ in count");
  IdSet reached;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].empty()) throw ContractError("cover set '" + labels[i] + "' is empty");
    if (!is_subset(sets[i], ground)) throw ContractError("cover set '" + labels[i] + "' leaves the ground set");
    reached = set_union(reached, sets[i]);
  }
  if (reached != ground) throw ContractError("cover sets do not cover the ground set");
}

namespace {

// Position of every ground id, for dense per-point counters.
std::vector<std::int64_t> ground_positions(const IdSet& ground) {
  std::vector<std::int64_t> pos(ground.empty() ? 0 : ground.back() + 1, -1);
  for (std::size_t i = 0; i < ground.size(); ++i) pos[ground[i]] = static_cast<std::int64_t>(i);
  return pos;
}

}  // namespace

std::vector<int> multiplicities(const Cover& cover) {
  const auto pos = ground_positions(cover.ground);
  std::vector<int> count(cover.ground.size(), 0);
  for (const auto& s : cover.sets) {
    for (PointId x : s) {
      if (x < pos.size() && pos[x] >= 0) ++count[pos[x]];
    }
  }
  return count;
}

int order(const Cover& cover) {
  const auto count = multiplicities(cover);
  int best = 0;
  for (int c : count) best = std::max(best, c);
  return best - 1;
}

std::optional<int> order_in(const Cover& cover, const IdSet& region) {
  if (!is_subset(region, cover.ground)) throw ContractError("region is not contained in the ground set");
  if (region.empty()) return std::nullopt;
  const auto pos = ground_positions(cover.ground);
  const auto count = multiplicities(cover);
  int best = 0;
  for (PointId x : region) best = std::max(best, count[pos[x]]);
  return best - 1;
}

RefinementResult refines(const Cover& v, const Cover& u) {
  if (v.ground != u.ground) throw ContractError("covers have different ground sets");
  RefinementResult result;
  result.refines = true;
  result.witness.resize(v.sets.size());
  for (std::size_t j = 0; j < v.sets.size(); ++j) {
    for (std::size_t i = 0; i < u.sets.size(); ++i) {
      if (is_subset(v.sets[j], u.sets[i])) {
        result.witness[j] = i;
        break;
      }
    }
    if (!result.witness[j] && result.refines) {
      result.refines = false;
      result.offending = j;
    }
  }
  return result;
}

double lebesgue_number(const Cover& cover, const FiniteMetricSpace& space) {
  if (cover.ground != iota_ids(space.size())) throw ContractError("cover ground does not match the space");
  cover.validate();
  const double cap = space.diameter() + 1.0;
  std::vector<std::vector<std::uint8_t>> outside(cover.sets.size(),
                                                 std::vector<std::uint8_t>(space.size(), 1));
  for (std::size_t i = 0; i < cover.sets.size(); ++i) {
    for (PointId x : cover.sets[i]) outside[i][x] = 0;
  }
  double lambda = std::numeric_limits<double>::infinity();
  for (PointId x = 0; x < space.size(); ++x) {
    double best = 0.0;
    for (std::size_t i = 0; i < cover.sets.size(); ++i) {
      if (outside[i][x]) continue;
      best = std::max(best, std::min(cap, kernels::min_masked(space.row(x), outside[i])));
    }
    lambda = std::min(lambda, best);
  }
  return lambda;
}

// ---------------------------------------------------------------------------
// Cube cover

int UnitCell::stratum() const {
  return static_cast<int>(std::count(interval.begin(), interval.end(), true));
}

std::string UnitCell::label() const {
  std::string out;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (i) out += "x";
    if (interval[i]) {
      out += "(" + std::to_string(k[i]) + "," + std::to_string(k[i] + 1) + ")";
    } else {
      out += "{" + std::to_string(k[i]) + "}";
    }
  }
  return out;
}

namespace {

const mpq_class kQuarter(1, 4);

// y lies in U(cell) iff max_point |y_i - k_i| < min(1/4, min_interval dist(y_i, endpoints)),
// with every interval coordinate strictly inside its interval.
bool in_neighbourhood_exact(const UnitCell& cell, const std::vector<mpq_class>& y) {
  mpq_class a = 0;
  mpq_class bound = kQuarter;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const mpq_class k(cell.k[i]);
    if (cell.interval[i]) {
      const mpq_class lo = y[i] - k;
      const mpq_class hi = k + 1 - y[i];
      if (sgn(lo) <= 0 || sgn(hi) <= 0) return false;
      bound = std::min(bound, std::min(lo, hi));
    } else {
      a = std::max(a, mpq_class(abs(y[i] - k)));
    }
  }
  return a < bound;
}

long floor_of(const mpq_class& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f.get_si();
}

}  // namespace

bool in_cell_neighbourhood(const UnitCell& cell, std::span<const double> y) {
  std::vector<mpq_class> exact;
  for (double v : y) exact.push_back(exact_dyadic(v));
  return in_neighbourhood_exact(cell, exact);
}

CubeCover cube_cover(const CubeCoverSpec& spec) {
  const auto n = static_cast<std::size_t>(spec.n);
  if (spec.n < 1) throw ContractError("cube cover needs n >= 1");
  if (spec.lo.size() != n || spec.hi.size() != n) throw ContractError("box bounds must have n entries");
  if (!(spec.lambda > 0.0)) throw ContractError("lambda must be positive");
  if (!(spec.pitch > 0.0)) throw ContractError("grid pitch must be positive");
  const mpq_class lambda = decimal_rational(spec.lambda);
  const mpq_class pitch = decimal_rational(spec.pitch);
  if (pitch * 24 > lambda) throw ContractError("grid pitch exceeds lambda/24");

  std::vector<mpq_class> lo(n);
  std::vector<long> steps(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = decimal_rational(spec.lo[i]);
    const mpq_class hi = decimal_rational(spec.hi[i]);
    if (hi < lo[i]) throw ContractError("box is empty");
    steps[i] = floor_of(mpq_class((hi - lo[i]) / pitch)) + 1;
    total *= static_cast<std::size_t>(steps[i]);
    if (total > 5'000'000) throw ContractError("grid too large");
  }

  CubeCover out;
  out.grid = PointCloud(total, n);
  std::vector<std::vector<mpq_class>> exact(total, std::vector<mpq_class>(n));
  std::map<UnitCell, IdSet> members;
  const mpq_class scale = mpq_class(3) / lambda;
  std::vector<long> index(n, 0);
  std::vector<mpq_class> scaled(n);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rest = p;
    for (std::size_t i = n; i-- > 0;) {
      index[i] = static_cast<long>(rest % static_cast<std::size_t>(steps[i]));
      rest /= static_cast<std::size_t>(steps[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      exact[p][i] = lo[i] + pitch * index[i];
      out.grid(p, i) = exact[p][i].get_d();
      scaled[i] = exact[p][i] * scale;
    }
    // Per axis: the nearest integer as a point factor, the enclosing open
    // interval as an interval factor.
    std::vector<std::vector<std::pair<long, bool>>> options(n);
    for (std::size_t i = 0; i < n; ++i) {
      const long fl = floor_of(scaled[i]);
      const long nearest = floor_of(mpq_class(scaled[i] + mpq_class(1, 2)));
      options[i].push_back({nearest, false});
      if (scaled[i] != mpq_class(fl)) options[i].push_back({fl, true});
    }
    UnitCell cell{std::vector<long>(n), std::vector<bool>(n)};
    std::vector<std::size_t> choice(n, 0);
    while (true) {
      for (std::size_t i = 0; i < n; ++i) {
        cell.k[i] = options[i][choice[i]].first;
        cell.interval[i] = options[i][choice[i]].second;
      }
      if (in_neighbourhood_exact(cell, scaled)) members[cell].push_back(static_cast<PointId>(p));
      std::size_t axis = 0;
      while (axis < n && ++choice[axis] == options[axis].size()) choice[axis++] = 0;
      if (axis == n) break;
    }
  }

  std::vector<IdSet> sets;
  std::vector<std::string> labels;
  const mpq_class half_lambda = lambda / 2;
  for (auto& [cell, ids] : members) {
    mpq_class diam = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mpq_class mn = exact[ids.front()][i];
      mpq_class mx = mn;
      for (PointId p : ids) {
        mn = std::min(mn, exact[p][i]);
        mx = std::max(mx, exact[p][i]);
      }
      diam = std::max(diam, mpq_class(mx - mn));
    }
    if (diam > half_lambda) out.diameters_exact_within = false;
    out.diameter.push_back(diam.get_d());
    out.stratum.push_back(cell.stratum());
    labels.push_back(cell.label());
    sets.push_back(ids);
  }
  out.cover = Cover::make(iota_ids(total), std::move(sets), std::move(labels));
  return out;
}

// ---------------------------------------------------------------------------
// Merge and staged construction

Cover merge_refinements(const Cover& a1, const Cover& a2, const IdSet& x1, const IdSet& x2) {
  if (set_union(x1, x2) != a1.ground) throw ContractError("X1 and X2 do not cover the ground set");
  const auto ref = refines(a2, a1);
  if (!ref.refines) {
    throw ContractError("second cover does not refine the first (set '" + a2.labels[*ref.offending] + "')");
  }
  std::vector<IdSet> amalgam(a1.sets.size());
  for (std::size_t j = 0; j < a2.sets.size(); ++j) {
    auto& target = amalgam[*ref.witness[j]];
    target = set_union(target, a2.sets[j]);
  }
  std::vector<IdSet> sets;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < amalgam.size(); ++i) {
    if (amalgam[i].empty()) continue;
    sets.push_back(std::move(amalgam[i]));
    labels.push_back("V(" + a1.labels[i] + ")");
  }
  return Cover::make(a1.ground, std::move(sets), std::move(labels));
}

StagedCoverResult staged_cover(const Cover& u, const Exhaustion& exhaustion, const Refiner& refiner,
                               int d) {
  if (d < 0) throw ContractError("d must be nonnegative");
  u.validate();
  exhaustion.validate(u.ground);
  const std::size_t K = exhaustion.size();
  const IdSet empty;
  // C(j) for j in [-1, K + 1], with C(-1) = C(0) = {} and C(K + 1) = C(K).
  auto C = [&](long j) -> const IdSet& {
    if (j <= 0) return empty;
    if (static_cast<std::size_t>(j) > K) return exhaustion.stages.back();
    return exhaustion.stages[static_cast<std::size_t>(j) - 1];
  };

  StagedCoverResult result;
  Cover current = u;
  std::vector<IdSet> collected;
  std::vector<std::string> collected_labels;
  std::set<IdSet> seen;

  for (std::size_t i = 0; i <= K; ++i) {
    const auto li = static_cast<long>(i);
    const IdSet& prev = C(li - 1);
    const IdSet& here = C(li);
    const IdSet& next = C(li + 1);
    const std::string stage = "stage " + std::to_string(i + 1);

    Cover w;
    if (i == K) {
      w = current;
    } else {
      std::vector<IdSet> parts;
      std::vector<std::string> part_labels;
      for (std::size_t s = 0; s < current.sets.size(); ++s) {
        IdSet inner = set_intersection(current.sets[s], next);
        IdSet outer = set_difference(current.sets[s], here);
        if (!inner.empty()) {
          parts.push_back(std::move(inner));
          part_labels.push_back(current.labels[s] + "|in");
        }
        if (!outer.empty()) {
          parts.push_back(std::move(outer));
          part_labels.push_back(current.labels[s] + "|out");
        }
      }
      const Cover target = Cover::make(u.ground, std::move(parts), std::move(part_labels));
      const IdSet shell = set_difference(next, here);
      w = refiner(target, shell, i + 1);
      ++result.refiner_calls;
      if (w.ground != u.ground) throw ContractError("refiner output at " + stage + " has the wrong ground set");
      w.validate();
      const auto ref = refines(w, target);
      if (!ref.refines) {
        throw ContractError("refiner output at " + stage + " does not refine its target (set '" +
                            w.labels[*ref.offending] + "')");
      }
      if (auto o = order_in(w, shell); o && *o > d) {
        throw ContractError("refiner output at " + stage + " has order " + std::to_string(*o) +
                            " > " + std::to_string(d) + " on its shell");
      }
    }

    const auto witness = refines(w, current);
    std::vector<IdSet> amalgam(current.sets.size());
    std::vector<IdSet> fresh;
    for (std::size_t j = 0; j < w.sets.size(); ++j) {
      if (!intersects(w.sets[j], here)) {
        fresh.push_back(w.sets[j]);
        continue;
      }
      const std::size_t f = *witness.witness[j];
      if (!intersects(current.sets[f], prev)) amalgam[f] = set_union(amalgam[f], w.sets[j]);
    }

    std::vector<IdSet> sets;
    std::vector<std::string> labels;
    for (std::size_t s = 0; s < current.sets.size(); ++s) {
      if (intersects(current.sets[s], prev)) {
        sets.push_back(current.sets[s]);
        labels.push_back(current.labels[s]);
      }
    }
    for (std::size_t s = 0; s < current.sets.size(); ++s) {
      if (!amalgam[s].empty()) {
        sets.push_back(std::move(amalgam[s]));
        labels.push_back("V" + std::to_string(i + 1) + "." + std::to_string(labels.size()));
      }
    }
    for (auto& f : fresh) {
      sets.push_back(std::move(f));
      labels.push_back("V" + std::to_string(i + 1) + "." + std::to_string(labels.size()));
    }
    Cover following = Cover::make(u.ground, std::move(sets), std::move(labels));
    try {
      following.validate();
    } catch (const ContractError& e) {
      throw PipelineError("staged construction lost coverage at " + stage + ": " + e.what());
    }
    const int stage_order = order_in(following, next).value_or(-1);
    if (stage_order > d) {
      throw PipelineError("staged construction exceeded order " + std::to_string(d) + " at " + stage);
    }
    result.stage_orders.push_back(stage_order);

    for (std::size_t s = 0; s < following.sets.size(); ++s) {
      if (intersects(following.sets[s], here) && seen.insert(following.sets[s]).second) {
        collected.push_back(following.sets[s]);
        collected_labels.push_back(following.labels[s]);
      }
    }
    current = std::move(following);
  }

  result.cover = Cover::make(u.ground, std::move(collected), std::move(collected_labels));
  result.cover.validate();
  const auto ref = refines(result.cover, u);
  if (!ref.refines) throw PipelineError("staged construction does not refine the input cover");
  result.witness = ref.witness;
  if (order(result.cover) > d) throw PipelineError("staged construction exceeded the order bound");
  return result;
}

Refiner split_refiner(Cover base) {
  return [base = std::move(base)](const Cover& target, const IdSet&, std::size_t) {
    if (base.ground != target.ground) throw ContractError("split refiner ground mismatch");
    std::vector<std::int64_t> first(base.ground.empty() ? 0 : base.ground.back() + 1, -1);
    for (std::size_t t = target.sets.size(); t-- > 0;) {
      for (PointId x : target.sets[t]) first[x] = static_cast<std::int64_t>(t);
    }
    std::vector<IdSet> sets;
    std::vector<std::string> labels;
    for (std::size_t s = 0; s < base.sets.size(); ++s) {
      std::map<std::int64_t, IdSet> parts;
      for (PointId x : base.sets[s]) parts[first[x]].push_back(x);
      for (auto& [t, ids] : parts) {
        if (t < 0) throw ContractError("split refiner target does not cover the ground set");
        sets.push_back(std::move(ids));
        labels.push_back(base.labels[s] + "&" + target.labels[static_cast<std::size_t>(t)]);
      }
    }
    return Cover::make(base.ground, std::move(sets), std::move(labels));
  };
}

}  // namespace topembed
