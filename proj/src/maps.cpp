#include "topembed/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topembed/error.hpp"
#include "topembed/kernels.hpp"

namespace topembed {

PLMap::PLMap(std::shared_ptr<const SimplicialComplex> complex, PointCloud vertex_images)
    : complex_(std::move(complex)), images_(std::move(vertex_images)) {
  if (!complex_) throw ContractError("PL map needs a complex");
  if (images_.size() != complex_->vertex_count()) {
    throw ContractError("PL map needs one image per vertex");
  }
}

Point PLMap::evaluate(std::size_t simplex, std::span<const double> barycentric) const {
  if (simplex >= complex_->simplices().size()) throw ContractError("point lies outside the complex");
  const auto& verts = complex_->simplices()[simplex];
  if (barycentric.size() != verts.size()) throw ContractError("barycentric vector has the wrong length");
  double total = 0.0;
  for (double b : barycentric) {
    if (b < 0.0) throw ContractError("negative barycentric coordinate");
    total += b;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw ContractError("barycentric coordinates do not sum to 1");
  Point out(images_.dim(), 0.0);
  for (std::size_t k = 0; k < images_.dim(); ++k) {
    for (std::size_t j = 0; j < verts.size(); ++j) out[k] += barycentric[j] * images_(verts[j], k);
  }
  return out;
}

Point PLMap::evaluate(const Simplex& simplex, std::span<const double> barycentric) const {
  Simplex sorted = simplex;
  std::sort(sorted.begin(), sorted.end());
  const auto id = complex_->find(sorted);
  if (!id) throw ContractError("point lies outside the complex");
  if (sorted == simplex) return evaluate(*id, barycentric);
  std::vector<double> permuted(barycentric.size());
  for (std::size_t j = 0; j < simplex.size(); ++j) {
    const auto pos = std::lower_bound(sorted.begin(), sorted.end(), simplex[j]) - sorted.begin();
    permuted[static_cast<std::size_t>(pos)] = barycentric[j];
  }
  return evaluate(*id, permuted);
}

PointCloud PLMap::on_samples(const SampleSet& samples) const {
  if (samples.complex().simplices() != complex_->simplices()) {
    throw ContractError("samples belong to a different complex");
  }
  return samples.positions(images_);
}

// ---------------------------------------------------------------------------

FiberResult fiber_diameter(const PointCloud& f, const IdSet& region, double tau,
                           const FiniteMetricSpace& space) {
  if (tau < 0.0) throw ContractError("tau must be nonnegative");
  FiberResult out;
  std::vector<double> query(f.dim());
  std::vector<double> image_dist(f.size());
  for (std::size_t a = 0; a < region.size(); ++a) {
    const PointId x = region[a];
    if (x >= f.size() || x >= space.size()) throw ContractError("region point outside the samples");
    for (std::size_t k = 0; k < f.dim(); ++k) query[k] = f(x, k);
    f.supnorm_row(query, image_dist);
    const auto row = space.row(x);
    for (std::size_t b = a + 1; b < region.size(); ++b) {
      const PointId y = region[b];
      if (image_dist[y] <= tau && row[y] > out.value) {
        out.value = row[y];
        out.witness = std::make_pair(x, y);
      }
    }
  }
  return out;
}

bool in_U_eps(const PointCloud& f, const IdSet& region, double eps, double tau,
              const FiniteMetricSpace& space) {
  if (!(eps > 0.0)) throw ContractError("eps must be positive");
  return fiber_diameter(f, region, tau, space).value < eps;
}

// ---------------------------------------------------------------------------

PartitionOfUnity::PartitionOfUnity(IdSet ground, std::size_t set_count, std::vector<std::size_t> offsets,
                                   std::vector<Entry> entries)
    : ground_(std::move(ground)),
      set_count_(set_count),
      offsets_(std::move(offsets)),
      entries_(std::move(entries)) {}

std::span<const PartitionOfUnity::Entry> PartitionOfUnity::at_position(std::size_t position) const {
  return {entries_.data() + offsets_[position], offsets_[position + 1] - offsets_[position]};
}

std::span<const PartitionOfUnity::Entry> PartitionOfUnity::at(PointId x) const {
  auto it = std::lower_bound(ground_.begin(), ground_.end(), x);
  if (it == ground_.end() || *it != x) throw ContractError("point outside the partition's ground set");
  return at_position(static_cast<std::size_t>(it - ground_.begin()));
}

double PartitionOfUnity::weight(std::size_t set, PointId x) const {
  for (const auto& e : at(x)) {
    if (e.set == set) return e.weight;
  }
  return 0.0;
}

std::vector<double> PartitionOfUnity::dense(PointId x) const {
  std::vector<double> out(set_count_, 0.0);
  for (const auto& e : at(x)) out[e.set] = e.weight;
  return out;
}

bool PartitionOfUnity::operator==(const PartitionOfUnity& other) const {
  if (ground_ != other.ground_ || set_count_ != other.set_count_ || offsets_ != other.offsets_) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].set != other.entries_[i].set || entries_[i].weight != other.entries_[i].weight) {
      return false;
    }
  }
  return true;
}

PartitionOfUnity partition_of_unity(const Cover& cover, const FiniteMetricSpace& space) {
  cover.validate();
  if (!cover.ground.empty() && cover.ground.back() >= space.size()) {
    throw ContractError("cover ground leaves the space");
  }
  const std::size_t n = space.size();
  // raw[position] = list of (set, g_i(x)) with g_i(x) > 0.
  std::vector<std::vector<PartitionOfUnity::Entry>> raw(cover.ground.size());
  std::vector<std::int64_t> position(n, -1);
  for (std::size_t p = 0; p < cover.ground.size(); ++p) position[cover.ground[p]] = static_cast<std::int64_t>(p);
  std::vector<std::uint8_t> outside(n);
  for (std::size_t i = 0; i < cover.sets.size(); ++i) {
    const IdSet& u = cover.sets[i];
    const bool full = u.size() == cover.ground.size();
    std::fill(outside.begin(), outside.end(), 0);
    for (PointId x : cover.ground) outside[x] = 1;
    for (PointId x : u) outside[x] = 0;
    for (PointId x : u) {
      const double g = full ? 1.0 : kernels::min_masked(space.row(x), outside);
      if (g > 0.0) raw[static_cast<std::size_t>(position[x])].push_back({i, g});
    }
  }
  std::vector<std::size_t> offsets{0};
  std::vector<PartitionOfUnity::Entry> entries;
  for (std::size_t p = 0; p < raw.size(); ++p) {
    double total = 0.0;
    for (const auto& e : raw[p]) total += e.weight;
    if (!(total > 0.0)) {
      throw ContractError("partition of unity undefined at '" + space.ids()[cover.ground[p]] + "'");
    }
    for (const auto& e : raw[p]) entries.push_back({e.set, e.weight / total});
    offsets.push_back(entries.size());
  }
  return PartitionOfUnity(cover.ground, cover.sets.size(), std::move(offsets), std::move(entries));
}

// ---------------------------------------------------------------------------

std::vector<double> proper_height(const Exhaustion& exhaustion, const FiniteMetricSpace& space) {
  const IdSet ground = iota_ids(space.size());
  exhaustion.validate(ground);
  const std::size_t K = exhaustion.size();
  const IdSet empty;
  auto C = [&](std::size_t j) -> const IdSet& {
    if (j == 0) return empty;
    return exhaustion.stages[std::min(j, K) - 1];
  };
  std::vector<IdSet> sets;
  std::vector<double> level;
  for (std::size_t k = 1; k <= K; ++k) {
    IdSet annulus = set_difference(C(k + 1), C(k - 1));
    if (annulus.empty()) continue;
    sets.push_back(std::move(annulus));
    level.push_back(static_cast<double>(k));
  }
  const PartitionOfUnity phi = partition_of_unity(Cover::make(ground, sets), space);
  std::vector<double> f(space.size(), 0.0);
  for (PointId x = 0; x < space.size(); ++x) {
    for (const auto& e : phi.at_position(x)) f[x] += level[e.set] * e.weight;
  }
  return f;
}

EscapeReport escapes_to_infinity(const PointCloud& f, const Exhaustion& exhaustion,
                                 const std::vector<double>& ladder) {
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (!(ladder[i] > ladder[i - 1])) throw ContractError("ladder must be strictly increasing");
  }
  EscapeReport out;
  out.ladder = ladder;
  std::vector<double> norm(f.size());
  const std::vector<double> origin(f.dim(), 0.0);
  f.supnorm_row(origin, norm);
  std::vector<std::uint8_t> outside(f.size());
  for (const auto& stage : exhaustion.stages) {
    std::fill(outside.begin(), outside.end(), 1);
    for (PointId x : stage) {
      if (x < outside.size()) outside[x] = 0;
    }
    out.outside_min_norm.push_back(kernels::min_masked(norm, outside));
  }
  for (double R : ladder) {
    std::optional<std::size_t> witness;
    for (std::size_t k = 0; k < out.outside_min_norm.size() && !witness; ++k) {
      if (out.outside_min_norm[k] > R) witness = k;
    }
    out.witness_stage.push_back(witness);
    if (!witness) out.escapes = false;
  }
  return out;
}

PointCloud blend_extend(const PointCloud& h, const IdSet& region, const FiniteMetricSpace& space, double w,
                        double bound) {
  if (!(w > 0.0)) throw ContractError("blend width must be positive");
  if (region.empty()) throw ContractError("blend region is empty");
  if (h.size() != space.size()) throw ContractError("h must be indexed by sample");
  for (PointId x : region) {
    for (std::size_t k = 0; k < h.dim(); ++k) {
      if (!(std::fabs(h(x, k)) <= bound)) throw ContractError("h exceeds its declared bound on the region");
    }
  }
  PointCloud out(space.size(), h.dim());
  for (PointId x = 0; x < space.size(); ++x) {
    const auto row = space.row(x);
    PointId nearest = region.front();
    for (PointId y : region) {
      if (row[y] < row[nearest]) nearest = y;
    }
    const double beta = std::max(0.0, 1.0 - row[nearest] / w);
    for (std::size_t k = 0; k < h.dim(); ++k) out(x, k) = beta == 1.0 ? h(nearest, k) : beta * h(nearest, k);
  }
  return out;
}

}  // namespace topembed
