#include "topembed/subdivision.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "topembed/error.hpp"

namespace topembed {

SubdivisionCarriers subdivide(const SampleSet& samples, int rounds) {
  if (rounds < 0) throw ContractError("subdivision rounds must be nonnegative");
  SubdivisionCarriers out;
  out.vertex_count = samples.complex().vertex_count();
  out.carriers.resize(samples.size());
  out.weights.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.carriers[i] = samples.complex().simplices()[samples[i].simplex];
    out.weights[i] = samples[i].lattice;
  }
  for (int r = 0; r < rounds; ++r) out = subdivide_once(out);
  return out;
}

// Sorting the weights descending, the chain faces tau_j = top-j vertices carry
// weights j * (w_j - w_{j+1}); faces with zero weight drop out.
SubdivisionCarriers subdivide_once(const SubdivisionCarriers& level) {
  SubdivisionCarriers out;
  out.rounds = level.rounds + 1;
  out.carriers.resize(level.carriers.size());
  out.weights.resize(level.carriers.size());
  std::map<IdSet, PointId> interned;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < level.carriers.size(); ++i) {
    const IdSet& verts = level.carriers[i];
    const auto& w = level.weights[i];
    order.resize(verts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    std::vector<std::pair<PointId, std::uint32_t>> next;
    IdSet chain;
    for (std::size_t j = 0; j < order.size(); ++j) {
      chain.insert(std::upper_bound(chain.begin(), chain.end(), verts[order[j]]), verts[order[j]]);
      const std::uint32_t below = j + 1 < order.size() ? w[order[j + 1]] : 0;
      const auto mu = static_cast<std::uint32_t>((j + 1) * (w[order[j]] - below));
      if (mu == 0) continue;
      auto it = interned.try_emplace(chain, static_cast<PointId>(interned.size())).first;
      next.push_back({it->second, mu});
    }
    std::sort(next.begin(), next.end());
    for (auto [v, mu] : next) {
      out.carriers[i].push_back(v);
      out.weights[i].push_back(mu);
    }
  }
  out.vertex_count = interned.size();
  return out;
}

Cover star_cover(const SubdivisionCarriers& carriers, const IdSet& region) {
  std::vector<IdSet> stars(carriers.vertex_count);
  for (PointId x : region) {
    if (x >= carriers.carriers.size()) throw ContractError("region point outside the sample set");
    for (PointId v : carriers.carriers[x]) stars[v].push_back(x);
  }
  std::vector<IdSet> sets;
  std::vector<std::string> labels;
  for (std::size_t v = 0; v < stars.size(); ++v) {
    if (stars[v].empty()) continue;
    sets.push_back(std::move(stars[v]));
    labels.push_back("st" + std::to_string(carriers.rounds) + "." + std::to_string(v));
  }
  return Cover::make(region, std::move(sets), std::move(labels));
}

Cover star_cover(const SampleSet& samples, int rounds, const IdSet& region) {
  return star_cover(subdivide(samples, rounds), region);
}

std::uint32_t chain_resolution(int n) {
  if (n < 0) throw ContractError("dimension must be nonnegative");
  const auto k = static_cast<std::uint32_t>(n);
  return (k + 1) * (k + 2) / 2;
}

int dimension_upper_bound(const SimplicialComplex& complex, const SampleSet& samples, int rounds) {
  if (rounds < 1) throw ContractError("rounds must be at least 1");
  if (&samples.complex() != &complex && samples.complex().simplices() != complex.simplices()) {
    throw ContractError("samples belong to a different complex");
  }
  return order(star_cover(samples, rounds, iota_ids(samples.size())));
}

}  // namespace topembed
