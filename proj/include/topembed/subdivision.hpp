#pragma once

#include <cstdint>
#include <vector>

#include "topembed/covers.hpp"
#include "topembed/ids.hpp"
#include "topembed/space.hpp"

namespace topembed {

/// Carriers of the samples in the r-fold barycentric subdivision.
///
/// Level-0 vertices are the complex's vertices. A level-(r+1) vertex is the
/// barycenter of a level-r simplex, interned by its sorted level-r vertex ids.
/// Barycentric numerators keep the sample resolution as common denominator.
struct SubdivisionCarriers {
  int rounds = 0;
  std::size_t vertex_count = 0;
  std::vector<IdSet> carriers;                      // per sample, level-r vertex ids
  std::vector<std::vector<std::uint32_t>> weights;  // numerators aligned with carriers
};

SubdivisionCarriers subdivide(const SampleSet& samples, int rounds);

/// One further round applied to existing carriers.
SubdivisionCarriers subdivide_once(const SubdivisionCarriers& level);

/// Open-star cover of the r-fold subdivision restricted to `region`: one set
/// per level-r vertex whose star meets the region. Its order at a sample is
/// the carrier size minus one, hence at most n.
Cover star_cover(const SubdivisionCarriers& carriers, const IdSet& region);
Cover star_cover(const SampleSet& samples, int rounds, const IdSet& region);

/// Smallest sample resolution whose lattice has a point with pairwise distinct
/// positive weights on an n-simplex, so some sample lies in an open top simplex
/// of the first subdivision.
std::uint32_t chain_resolution(int n);

/// Order of the open-star cover of the `rounds`-fold subdivision on all samples.
int dimension_upper_bound(const SimplicialComplex& complex, const SampleSet& samples, int rounds);

}  // namespace topembed
