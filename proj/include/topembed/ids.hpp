#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace topembed {

/// Index of a point in a finite ground set (samples, grid points, poset cells).
using PointId = std::uint32_t;

/// Sorted, duplicate-free list of point ids.
using IdSet = std::vector<PointId>;

inline IdSet make_id_set(std::vector<PointId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

inline IdSet iota_ids(std::size_t count) {
  IdSet ids(count);
  for (std::size_t i = 0; i < count; ++i) ids[i] = static_cast<PointId>(i);
  return ids;
}

inline bool is_subset(const IdSet& inner, const IdSet& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

inline bool contains(const IdSet& set, PointId id) {
  return std::binary_search(set.begin(), set.end(), id);
}

inline bool intersects(const IdSet& a, const IdSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

inline IdSet set_union(const IdSet& a, const IdSet& b) {
  IdSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IdSet set_intersection(const IdSet& a, const IdSet& b) {
  IdSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IdSet set_difference(const IdSet& a, const IdSet& b) {
  IdSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace topembed
