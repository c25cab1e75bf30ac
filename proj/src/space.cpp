#include "topembed/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "topembed/error.hpp"
#include "topembed/kernels.hpp"

namespace topembed {

// ---------------------------------------------------------------------------
// PointCloud

void PointCloud::supnorm_row(std::span<const double> query, std::span<double> out) const {
  kernels::supnorm_to_many(query, soa_, count_, out);
}

double PointCloud::supnorm(std::size_t a, std::size_t b) const {
  double best = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) best = std::max(best, std::fabs((*this)(a, k) - (*this)(b, k)));
  return best;
}

PointCloud PointCloud::gather(const IdSet& ids) const {
  PointCloud out(ids.size(), dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    for (std::size_t j = 0; j < ids.size(); ++j) out(j, k) = (*this)(ids[j], k);
  }
  return out;
}

double max_supnorm(const PointCloud& cloud) {
  double best = 0.0;
  for (double v : cloud.soa()) best = std::max(best, std::fabs(v));
  return best;
}

// ---------------------------------------------------------------------------
// FiniteMetricSpace

FiniteMetricSpace FiniteMetricSpace::from_matrix(std::vector<std::string> ids,
                                                 std::vector<double> dist) {
  if (dist.size() != ids.size() * ids.size()) {
    throw ContractError("distance matrix size does not match the number of ids");
  }
  FiniteMetricSpace space;
  space.ids_ = std::move(ids);
  space.dist_ = std::move(dist);
  if (auto problem = space.check_axioms()) throw ContractError(*problem);
  return space;
}

FiniteMetricSpace FiniteMetricSpace::from_coordinates(std::vector<std::string> ids,
                                                      const PointCloud& coords) {
  if (ids.size() != coords.size()) throw ContractError("coordinate count does not match ids");
  FiniteMetricSpace space;
  const std::size_t n = ids.size();
  space.ids_ = std::move(ids);
  space.dist_.assign(n * n, 0.0);
  std::vector<double> query(coords.dim());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t k = 0; k < coords.dim(); ++k) query[k] = coords(a, k);
    coords.supnorm_row(query, std::span<double>(space.dist_.data() + a * n, n));
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (space.dist_[a * n + b] == 0.0) {
        throw ContractError("points '" + space.ids_[a] + "' and '" + space.ids_[b] +
                            "' have identical coordinates");
      }
    }
  }
  return space;
}

std::optional<PointId> FiniteMetricSpace::find(std::string_view label) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == label) return static_cast<PointId>(i);
  }
  return std::nullopt;
}

double FiniteMetricSpace::diameter() const {
  double best = 0.0;
  for (double d : dist_) best = std::max(best, d);
  return best;
}

double FiniteMetricSpace::diameter_of(const IdSet& subset) const {
  double best = 0.0;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (std::size_t j = i + 1; j < subset.size(); ++j) best = std::max(best, (*this)(subset[i], subset[j]));
  }
  return best;
}

double FiniteMetricSpace::distance_to(PointId x, const IdSet& target) const {
  double best = std::numeric_limits<double>::infinity();
  auto r = row(x);
  for (PointId y : target) best = std::min(best, r[y]);
  return best;
}

std::optional<std::string> FiniteMetricSpace::check_axioms(double tolerance) const {
  const std::size_t n = size();
  for (std::size_t a = 0; a < n; ++a) {
    if (dist_[a * n + a] != 0.0) return "nonzero self-distance at '" + ids_[a] + "'";
    for (std::size_t b = 0; b < n; ++b) {
      const double d = dist_[a * n + b];
      if (!(d >= 0.0) || !std::isfinite(d)) return "negative or non-finite distance";
      if (d != dist_[b * n + a]) return "asymmetric distance between '" + ids_[a] + "' and '" + ids_[b] + "'";
      if (a != b && d == 0.0) return "distinct ids '" + ids_[a] + "' and '" + ids_[b] + "' at distance 0";
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        if (dist_[a * n + c] > dist_[a * n + b] + dist_[b * n + c] + tolerance) {
          return "triangle inequality fails for '" + ids_[a] + "', '" + ids_[b] + "', '" + ids_[c] + "'";
        }
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// SimplicialComplex

namespace {

void canonicalize(std::vector<Simplex>& simplices) {
  for (auto& s : simplices) std::sort(s.begin(), s.end());
  std::sort(simplices.begin(), simplices.end(), [](const Simplex& a, const Simplex& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  simplices.erase(std::unique(simplices.begin(), simplices.end()), simplices.end());
}

}  // namespace

SimplicialComplex::SimplicialComplex(int n, std::vector<std::string> vertex_labels,
                                     std::vector<Simplex> simplices)
    : n_(n), labels_(std::move(vertex_labels)), simplices_(std::move(simplices)) {
  canonicalize(simplices_);
}

SimplicialComplex SimplicialComplex::from_facets(std::vector<std::string> vertex_labels,
                                                 std::vector<Simplex> facets) {
  std::set<Simplex> closed;
  int n = 0;
  for (auto facet : facets) {
    std::sort(facet.begin(), facet.end());
    facet.erase(std::unique(facet.begin(), facet.end()), facet.end());
    if (facet.empty()) continue;
    if (facet.size() > 20) throw ContractError("facet too large to close under faces");
    n = std::max(n, static_cast<int>(facet.size()) - 1);
    const std::uint32_t subsets = 1u << facet.size();
    for (std::uint32_t mask = 1; mask < subsets; ++mask) {
      Simplex face;
      for (std::size_t i = 0; i < facet.size(); ++i) {
        if (mask & (1u << i)) face.push_back(facet[i]);
      }
      closed.insert(std::move(face));
    }
  }
  for (PointId v = 0; v < vertex_labels.size(); ++v) closed.insert(Simplex{v});
  return SimplicialComplex(n, std::move(vertex_labels),
                           std::vector<Simplex>(closed.begin(), closed.end()));
}

void SimplicialComplex::validate() const {
  if (n_ < 0) throw ContractError("complex dimension must be nonnegative");
  if (labels_.empty()) throw ContractError("complex has no vertices");
  std::set<std::string> distinct(labels_.begin(), labels_.end());
  if (distinct.size() != labels_.size()) throw ContractError("duplicate vertex labels");
  std::set<Simplex> listed(simplices_.begin(), simplices_.end());
  bool top = false;
  for (const auto& s : simplices_) {
    if (s.empty()) throw ContractError("empty simplex listed");
    for (PointId v : s) {
      if (v >= labels_.size()) throw ContractError("simplex references an unknown vertex");
    }
    if (s.size() > static_cast<std::size_t>(n_) + 1) {
      throw ContractError("simplex with " + std::to_string(s.size()) + " vertices exceeds n + 1 = " +
                          std::to_string(n_ + 1));
    }
    if (s.size() == static_cast<std::size_t>(n_) + 1) top = true;
    if (s.size() > 1) {
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        Simplex face;
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (i != drop) face.push_back(s[i]);
        }
        if (!listed.count(face)) throw ContractError("complex is not face-closed");
      }
    }
  }
  for (PointId v = 0; v < labels_.size(); ++v) {
    if (!listed.count(Simplex{v})) throw ContractError("vertex '" + labels_[v] + "' is not listed as a simplex");
  }
  if (!top) throw ContractError("no simplex has n + 1 vertices");
}

std::optional<std::size_t> SimplicialComplex::find(const Simplex& s) const {
  auto it = std::lower_bound(simplices_.begin(), simplices_.end(), s, [](const Simplex& a, const Simplex& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  if (it != simplices_.end() && *it == s) return static_cast<std::size_t>(it - simplices_.begin());
  return std::nullopt;
}

std::optional<PointId> SimplicialComplex::find_vertex(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<PointId>(i);
  }
  return std::nullopt;
}

std::vector<std::size_t> SimplicialComplex::facets() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < simplices_.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = i + 1; j < simplices_.size() && maximal; ++j) {
      if (simplices_[j].size() > simplices_[i].size() &&
          std::includes(simplices_[j].begin(), simplices_[j].end(), simplices_[i].begin(),
                        simplices_[i].end())) {
        maximal = false;
      }
    }
    if (maximal) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SampleSet

namespace {

// Compositions of `total` into `parts` positive integers, lexicographic.
void compositions(std::uint32_t total, std::size_t parts, std::vector<std::uint32_t>& prefix,
                  std::vector<std::vector<std::uint32_t>>& out) {
  if (parts == 1) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (std::uint32_t first = 1; first + (parts - 1) <= total; ++first) {
    prefix.push_back(first);
    compositions(total - first, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

SampleSet::SampleSet(std::shared_ptr<const SimplicialComplex> complex, std::uint32_t resolution,
                     double mesh)
    : complex_(std::move(complex)), resolution_(resolution), mesh_(mesh) {
  const auto& simplices = complex_->simplices();
  std::vector<std::uint32_t> prefix;
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    std::vector<std::vector<std::uint32_t>> lattice;
    compositions(resolution_, simplices[s].size(), prefix, lattice);
    for (auto& l : lattice) samples_.push_back(Sample{s, std::move(l)});
  }
}

std::vector<double> SampleSet::barycentric(std::size_t i) const {
  const auto& lattice = samples_[i].lattice;
  std::vector<double> out(lattice.size());
  for (std::size_t j = 0; j < lattice.size(); ++j) {
    out[j] = static_cast<double>(lattice[j]) / static_cast<double>(resolution_);
  }
  return out;
}

std::vector<PointId> SampleSet::vertex_samples() const {
  std::vector<PointId> out(complex_->vertex_count());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = complex_->simplices()[samples_[i].simplex];
    if (s.size() == 1) out[s[0]] = static_cast<PointId>(i);
  }
  return out;
}

std::vector<std::string> SampleSet::labels() const {
  std::vector<std::string> out(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) out[i] = "s" + std::to_string(i);
  return out;
}

PointCloud SampleSet::positions(const PointCloud& vertex_coords) const {
  PointCloud out(samples_.size(), vertex_coords.dim());
  const double m = static_cast<double>(resolution_);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& verts = complex_->simplices()[samples_[i].simplex];
    for (std::size_t k = 0; k < vertex_coords.dim(); ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < verts.size(); ++j) {
        acc += static_cast<double>(samples_[i].lattice[j]) * vertex_coords(verts[j], k);
      }
      out(i, k) = acc / m;
    }
  }
  return out;
}

Realization realize_metric(std::shared_ptr<const SimplicialComplex> complex,
                           const PointCloud& vertex_coords, double mesh) {
  if (!complex) throw ContractError("null complex");
  if (!(mesh > 0.0)) throw ContractError("mesh must be positive");
  complex->validate();
  if (vertex_coords.size() != complex->vertex_count()) {
    throw ContractError("reference coordinates do not cover every vertex");
  }
  for (std::size_t a = 0; a < vertex_coords.size(); ++a) {
    for (std::size_t b = a + 1; b < vertex_coords.size(); ++b) {
      if (vertex_coords.supnorm(a, b) == 0.0) throw ContractError("reference coordinates are not injective");
    }
  }
  double longest = 0.0;
  for (const auto& s : complex->simplices()) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) longest = std::max(longest, vertex_coords.supnorm(s[i], s[j]));
    }
  }
  auto resolution = static_cast<std::uint32_t>(complex->dimension() + 1);
  if (longest > 0.0) {
    const double needed = std::ceil(longest / mesh);
    if (needed > 1e6) throw ContractError("mesh too fine for the reference realization");
    resolution = std::max(resolution, static_cast<std::uint32_t>(needed));
    while (longest / resolution > mesh) ++resolution;
  }
  Realization out;
  out.samples = SampleSet(complex, resolution, mesh);
  out.positions = out.samples.positions(vertex_coords);
  out.space = FiniteMetricSpace::from_coordinates(out.samples.labels(), out.positions);
  return out;
}

PointCloud standard_simplex_coords(const SimplicialComplex& complex) {
  PointCloud coords(complex.vertex_count(), complex.vertex_count());
  for (std::size_t v = 0; v < complex.vertex_count(); ++v) coords(v, v) = 1.0;
  return coords;
}

// ---------------------------------------------------------------------------
// Exhaustion

void Exhaustion::validate(const IdSet& ground) const {
  if (stages.empty() || stages.front().empty()) throw ContractError("first exhaustion stage is empty");
  for (std::size_t k = 0; k + 1 < stages.size(); ++k) {
    if (!is_subset(stages[k], stages[k + 1])) {
      throw ContractError("exhaustion stages are not nested at stage " + std::to_string(k + 1));
    }
  }
  if (stages.back() != ground) throw ContractError("last exhaustion stage is not the whole ground set");
}

Exhaustion build_exhaustion(const FiniteMetricSpace& space, int batch_count) {
  if (batch_count < 1) throw ContractError("batch_count must be at least 1");
  if (space.size() == 0) throw ContractError("cannot exhaust an empty space");
  const std::size_t n = space.size();
  std::vector<PointId> order(n);
  std::iota(order.begin(), order.end(), PointId{0});
  auto base = space.row(0);
  std::stable_sort(order.begin(), order.end(), [&](PointId a, PointId b) { return base[a] < base[b]; });
  Exhaustion ex;
  const auto batches = static_cast<std::size_t>(batch_count);
  for (std::size_t k = 1; k <= batches; ++k) {
    const std::size_t take = (k * n + batches - 1) / batches;
    ex.stages.push_back(make_id_set(std::vector<PointId>(order.begin(), order.begin() + take)));
  }
  return ex;
}

}  // namespace topembed
