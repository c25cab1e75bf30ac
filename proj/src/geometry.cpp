#include "topembed/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "topembed/error.hpp"
#include "topembed/exact.hpp"

namespace topembed {

__extension__ using u128 = unsigned __int128;

double delta_metric(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("delta_metric: dimension mismatch");
  double sup = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sup = std::max(sup, std::fabs(x[i] - y[i]));
  return std::min(1.0, sup);
}

RhoResult rho_metric(const PointCloud& f, const PointCloud& g, const IdSet& samples) {
  if (f.dim() != g.dim()) throw ContractError("rho_metric: target dimensions differ");
  if (f.size() != g.size()) throw ContractError("rho_metric: maps are defined on different sample sets");
  RhoResult out;
  for (PointId x : samples) {
    if (x >= f.size()) throw ContractError("rho_metric: sample outside the domain");
    double sup = 0.0;
    for (std::size_t k = 0; k < f.dim(); ++k) sup = std::max(sup, std::fabs(f(x, k) - g(x, k)));
    const double d = std::min(1.0, sup);
    if (!out.witness || d > out.value) {
      out.value = d;
      out.witness = x;
    }
  }
  return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

namespace {

constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  const u128 prod = static_cast<u128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(prod & kPrime);
  std::uint64_t hi = static_cast<std::uint64_t>(prod >> 61);
  std::uint64_t s = lo + hi;
  if (s >= kPrime) s -= kPrime;
  return s;
}

std::uint64_t submod(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kPrime - b; }

// One augmented row (1, x) scaled to integers, kept exactly and modulo the prime.
struct Row {
  std::vector<mpz_class> exact;
  std::vector<std::uint64_t> mod;
};

Row make_row(const std::vector<mpq_class>& point) {
  mpz_class den = 1;
  for (const auto& q : point) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  Row row;
  row.exact.reserve(point.size() + 1);
  row.exact.push_back(den);
  for (const auto& q : point) row.exact.push_back(q.get_num() * (den / q.get_den()));
  for (const auto& z : row.exact) row.mod.push_back(mpz_fdiv_ui(z.get_mpz_t(), kPrime));
  return row;
}

std::size_t rank_mod_p(std::vector<std::vector<std::uint64_t>> m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    const std::uint64_t a = m[rank][c];
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const std::uint64_t b = m[i][c];
      if (b == 0) continue;
      for (std::size_t j = c; j < cols; ++j) m[i][j] = submod(mulmod(m[i][j], a), mulmod(m[rank][j], b));
    }
    ++rank;
  }
  return rank;
}

std::size_t rank_bareiss(std::vector<std::vector<mpz_class>> m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  std::size_t rank = 0;
  mpz_class prev = 1;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        mpz_class v = m[i][j] * m[rank][c] - m[i][c] * m[rank][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m[i][j] = std::move(v);
      }
      m[i][c] = 0;
    }
    prev = m[rank][c];
    ++rank;
  }
  return rank;
}

std::size_t rank_rows(const std::vector<const Row*>& rows) {
  if (rows.empty()) return 0;
  const std::size_t full = std::min(rows.size(), rows[0]->exact.size());
  std::vector<std::vector<std::uint64_t>> mod;
  mod.reserve(rows.size());
  for (const Row* r : rows) mod.push_back(r->mod);
  if (rank_mod_p(std::move(mod)) == full) return full;
  std::vector<std::vector<mpz_class>> exact;
  exact.reserve(rows.size());
  for (const Row* r : rows) exact.push_back(r->exact);
  return rank_bareiss(std::move(exact));
}

std::size_t rank_floating(const std::vector<Point>& points) {
  const std::size_t rows = points.size();
  const std::size_t cols = points[0].size() + 1;
  std::vector<std::vector<double>> m(rows);
  double scale = 1.0;
  for (std::size_t i = 0; i < rows; ++i) {
    m[i].push_back(1.0);
    for (double v : points[i]) {
      m[i].push_back(v);
      scale = std::max(scale, std::fabs(v));
    }
  }
  const double tol = 1e-12 * scale;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    for (std::size_t i = rank; i < rows; ++i) {
      if (std::fabs(m[i][c]) > std::fabs(m[pivot][c])) pivot = i;
    }
    if (std::fabs(m[pivot][c]) <= tol) continue;
    std::swap(m[pivot], m[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const double f = m[i][c] / m[rank][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

void check_dims(const std::vector<Point>& points) {
  for (const auto& p : points) {
    if (p.size() != points[0].size()) throw ContractError("points have different dimensions");
  }
}

std::vector<mpq_class> to_exact(const Point& p) {
  std::vector<mpq_class> out;
  out.reserve(p.size());
  for (double v : p) out.push_back(exact_dyadic(v));
  return out;
}

}  // namespace

std::size_t affine_rank(const std::vector<Point>& points, Arithmetic mode) {
  if (points.empty()) return 0;
  check_dims(points);
  if (mode == Arithmetic::floating) return rank_floating(points);
  std::vector<Row> rows;
  rows.reserve(points.size());
  for (const auto& p : points) rows.push_back(make_row(to_exact(p)));
  std::vector<const Row*> ptrs;
  for (const auto& r : rows) ptrs.push_back(&r);
  return rank_rows(ptrs);
}

std::size_t affine_rank(const std::vector<std::vector<mpq_class>>& points) {
  if (points.empty()) return 0;
  std::vector<Row> rows;
  for (const auto& p : points) {
    if (p.size() != points[0].size()) throw ContractError("points have different dimensions");
    rows.push_back(make_row(p));
  }
  std::vector<const Row*> ptrs;
  for (const auto& r : rows) ptrs.push_back(&r);
  return rank_rows(ptrs);
}

bool is_affinely_independent(const std::vector<Point>& points, Arithmetic mode) {
  if (points.empty()) return true;
  check_dims(points);
  if (points.size() > points[0].size() + 1) return false;
  return affine_rank(points, mode) == points.size();
}

bool is_general_position(const std::vector<Point>& points, Arithmetic mode, std::size_t guard) {
  if (points.size() > guard) {
    throw ContractError("general-position check limited to " + std::to_string(guard) + " points");
  }
  if (points.size() <= 1) return true;
  check_dims(points);
  const std::size_t k = std::min(points.size(), points[0].size() + 1);
  std::vector<Row> rows;
  if (mode == Arithmetic::exact) {
    for (const auto& p : points) rows.push_back(make_row(to_exact(p)));
  }
  return for_each_combination(points.size(), k, [&](const std::vector<std::size_t>& idx) {
    if (mode == Arithmetic::exact) {
      std::vector<const Row*> subset;
      for (std::size_t i : idx) subset.push_back(&rows[i]);
      return rank_rows(subset) == k;
    }
    std::vector<Point> subset;
    for (std::size_t i : idx) subset.push_back(points[i]);
    return rank_floating(subset) == k;
  });
}

PerturbResult perturb_to_general_position(const std::vector<Point>& points, double r,
                                          std::uint64_t seed, const PerturbOptions& options) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ContractError("perturbation radius must be positive");
  if (options.retry_budget < 1) throw ContractError("retry budget must be positive");
  PerturbResult out;
  if (points.empty()) return out;
  check_dims(points);
  const std::size_t dim = points[0].size();
  const std::size_t cap = dim + 1;
  const mpq_class radius = exact_dyadic(r);

  // Families that contain each index, for the restricted mode.
  std::vector<std::vector<const IdSet*>> families_of(points.size());
  if (options.families) {
    for (const auto& f : *options.families) {
      for (PointId i : f) {
        if (i >= points.size()) throw ContractError("family references an unknown point");
        families_of[i].push_back(&f);
      }
    }
  }

  std::mt19937_64 rng(seed);
  auto unit = [&rng] {
    // Uniform on the open interval (-1, 1).
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    return 2.0 * u - 1.0;
  };

  out.points.reserve(points.size());
  std::vector<Row> rows;
  std::vector<Point> placed;

  // Subsets of {0..j} with at most dim + 1 points that contain j, given by
  // their other members. Only materialized in family mode.
  auto family_subsets = [&](std::size_t j) {
    std::set<std::vector<std::size_t>> subsets;
    for (const IdSet* f : families_of[j]) {
      if (f->size() > cap) throw ContractError("family larger than dim + 1 points cannot be independent");
      std::vector<std::size_t> pool;
      for (PointId i : *f) {
        if (i < j) pool.push_back(i);
      }
      if (pool.empty()) continue;
      const std::size_t size = std::min(pool.size() + 1, cap);
      for_each_combination(pool.size(), size - 1, [&](const std::vector<std::size_t>& idx) {
        std::vector<std::size_t> members;
        for (std::size_t i : idx) members.push_back(pool[i]);
        subsets.insert(std::move(members));
        return true;
      });
    }
    return std::vector<std::vector<std::size_t>>(subsets.begin(), subsets.end());
  };

  // Visits the other members of every subset to check for point j.
  auto visit_subsets = [&](std::size_t j, const std::vector<std::vector<std::size_t>>& listed,
                           auto&& check) {
    if (options.families) {
      for (const auto& others : listed) {
        if (!check(others)) return false;
      }
      return true;
    }
    const std::size_t size = std::min(j + 1, cap);
    return for_each_combination(j, size - 1, check);
  };

  for (std::size_t j = 0; j < points.size(); ++j) {
    if (j == 0) {
      out.points.push_back(points[0]);
      if (options.mode == Arithmetic::exact) rows.push_back(make_row(to_exact(points[0])));
      continue;
    }
    const auto subsets = options.families ? family_subsets(j) : std::vector<std::vector<std::size_t>>{};
    const auto centre = to_exact(points[j]);
    bool accepted = false;
    for (int attempt = 0; attempt < options.retry_budget && !accepted; ++attempt) {
      Point y(dim);
      bool inside = true;
      for (std::size_t k = 0; k < dim; ++k) {
        y[k] = points[j][k] + r * unit();
        if (!(abs(exact_dyadic(y[k]) - centre[k]) < radius)) inside = false;
      }
      if (!inside) {
        ++out.redraws;
        continue;
      }
      accepted = true;
      if (options.mode == Arithmetic::exact) {
        const Row candidate = make_row(to_exact(y));
        accepted = visit_subsets(j, subsets, [&](const std::vector<std::size_t>& others) {
          std::vector<const Row*> subset;
          for (std::size_t i : others) subset.push_back(&rows[i]);
          subset.push_back(&candidate);
          ++out.subset_checks;
          return rank_rows(subset) == subset.size();
        });
        if (accepted) rows.push_back(candidate);
      } else {
        accepted = visit_subsets(j, subsets, [&](const std::vector<std::size_t>& others) {
          std::vector<Point> subset;
          for (std::size_t i : others) subset.push_back(out.points[i]);
          subset.push_back(y);
          ++out.subset_checks;
          return rank_floating(subset) == subset.size();
        });
      }
      if (accepted) {
        out.points.push_back(std::move(y));
      } else {
        ++out.redraws;
      }
    }
    if (!accepted) {
      throw PipelineError("general-position retry budget exhausted at point " + std::to_string(j));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact linear programming

namespace {

using Matrix = std::vector<std::vector<mpq_class>>;

// Tableau simplex; the last column of T is the right-hand side. Maximizes
// cost.x over the columns not marked forbidden. Returns false if unbounded.
bool run_simplex(Matrix& T, std::vector<std::size_t>& basis, const std::vector<mpq_class>& cost,
                 const std::vector<bool>& forbidden) {
  const std::size_t rows = T.size();
  const std::size_t cols = cost.size();
  while (true) {
    std::optional<std::size_t> entering;
    for (std::size_t j = 0; j < cols && !entering; ++j) {
      if (forbidden[j]) continue;
      mpq_class reduced = cost[j];
      for (std::size_t i = 0; i < rows; ++i) reduced -= cost[basis[i]] * T[i][j];
      if (sgn(reduced) > 0) entering = j;
    }
    if (!entering) return true;
    const std::size_t e = *entering;
    std::optional<std::size_t> leaving;
    mpq_class best;
    for (std::size_t i = 0; i < rows; ++i) {
      if (sgn(T[i][e]) <= 0) continue;
      mpq_class ratio = T[i][cols] / T[i][e];
      if (!leaving || ratio < best || (ratio == best && basis[i] < basis[*leaving])) {
        leaving = i;
        best = ratio;
      }
    }
    if (!leaving) return false;
    const std::size_t l = *leaving;
    const mpq_class pivot = T[l][e];
    for (auto& v : T[l]) v /= pivot;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == l || sgn(T[i][e]) == 0) continue;
      const mpq_class factor = T[i][e];
      for (std::size_t j = 0; j <= cols; ++j) T[i][j] -= factor * T[l][j];
    }
    basis[l] = e;
  }
}

}  // namespace

std::optional<mpq_class> lp_maximize(const Matrix& A, const std::vector<mpq_class>& b,
                                     const std::vector<mpq_class>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw ContractError("lp: rhs size mismatch");
  for (const auto& row : A) {
    if (row.size() != n) throw ContractError("lp: row size mismatch");
  }
  // Columns: n structural, then m artificials, then the rhs.
  Matrix T(m, std::vector<mpq_class>(n + m + 1));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = sgn(b[i]) < 0;
    for (std::size_t j = 0; j < n; ++j) T[i][j] = flip ? mpq_class(-A[i][j]) : A[i][j];
    T[i][n + i] = 1;
    T[i][n + m] = flip ? mpq_class(-b[i]) : b[i];
    basis[i] = n + i;
  }
  std::vector<mpq_class> phase1(n + m);
  for (std::size_t i = 0; i < m; ++i) phase1[n + i] = -1;
  std::vector<bool> none(n + m, false);
  run_simplex(T, basis, phase1, none);
  mpq_class infeasibility = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n) infeasibility += T[i][n + m];
  }
  if (sgn(infeasibility) != 0) return std::nullopt;

  // Drive remaining (zero-valued) artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < T.size();) {
    if (basis[i] < n) {
      ++i;
      continue;
    }
    std::optional<std::size_t> col;
    for (std::size_t j = 0; j < n && !col; ++j) {
      if (sgn(T[i][j]) != 0) col = j;
    }
    if (!col) {
      T.erase(T.begin() + static_cast<long>(i));
      basis.erase(basis.begin() + static_cast<long>(i));
      continue;
    }
    const mpq_class pivot = T[i][*col];
    for (auto& v : T[i]) v /= pivot;
    for (std::size_t k = 0; k < T.size(); ++k) {
      if (k == i || sgn(T[k][*col]) == 0) continue;
      const mpq_class factor = T[k][*col];
      for (std::size_t j = 0; j <= n + m; ++j) T[k][j] -= factor * T[i][j];
    }
    basis[i] = *col;
    ++i;
  }

  std::vector<mpq_class> phase2(n + m);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
  std::vector<bool> forbid(n + m, false);
  for (std::size_t i = 0; i < m; ++i) forbid[n + i] = true;
  if (!run_simplex(T, basis, phase2, forbid)) throw ContractError("lp: objective is unbounded");
  mpq_class value = 0;
  for (std::size_t i = 0; i < T.size(); ++i) value += phase2[basis[i]] * T[i][n + m];
  return value;
}

std::string_view intersection_name(Intersection result) {
  switch (result) {
    case Intersection::disjoint:
      return "disjoint";
    case Intersection::intersect_in_common_face:
      return "intersect_in_common_face";
    case Intersection::intersect_improperly:
      return "intersect_improperly";
  }
  return "unknown";
}

Intersection simplices_disjoint(const std::vector<std::vector<mpq_class>>& s1,
                                const std::vector<std::vector<mpq_class>>& s2) {
  if (s1.empty() || s2.empty()) throw ContractError("empty simplex");
  const std::size_t dim = s1[0].size();
  for (const auto* s : {&s1, &s2}) {
    for (const auto& p : *s) {
      if (p.size() != dim) throw ContractError("simplex vertices have different dimensions");
    }
    if (s->size() > dim + 1 || affine_rank(*s) != s->size()) throw ContractError("degenerate simplex");
  }
  std::vector<bool> shared1(s1.size(), false);
  std::vector<bool> shared2(s2.size(), false);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    for (std::size_t j = 0; j < s2.size(); ++j) {
      if (s1[i] == s2[j]) shared1[i] = shared2[j] = true;
    }
  }
  const std::size_t n = s1.size() + s2.size();
  Matrix A;
  std::vector<mpq_class> b;
  for (std::size_t d = 0; d < dim; ++d) {
    std::vector<mpq_class> row(n);
    for (std::size_t i = 0; i < s1.size(); ++i) row[i] = s1[i][d];
    for (std::size_t j = 0; j < s2.size(); ++j) row[s1.size() + j] = -s2[j][d];
    A.push_back(std::move(row));
    b.push_back(0);
  }
  std::vector<mpq_class> sum1(n), sum2(n), c(n);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    sum1[i] = 1;
    if (!shared1[i]) c[i] = 1;
  }
  for (std::size_t j = 0; j < s2.size(); ++j) {
    sum2[s1.size() + j] = 1;
    if (!shared2[j]) c[s1.size() + j] = 1;
  }
  A.push_back(sum1);
  b.push_back(1);
  A.push_back(sum2);
  b.push_back(1);
  const auto best = lp_maximize(A, b, c);
  if (!best) return Intersection::disjoint;
  return sgn(*best) == 0 ? Intersection::intersect_in_common_face : Intersection::intersect_improperly;
}

Intersection simplices_disjoint(const std::vector<Point>& s1, const std::vector<Point>& s2) {
  std::vector<std::vector<mpq_class>> e1, e2;
  for (const auto& p : s1) e1.push_back(to_exact(p));
  for (const auto& p : s2) e2.push_back(to_exact(p));
  return simplices_disjoint(e1, e2);
}

}  // namespace topembed
