#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "topembed/covers.hpp"
#include "topembed/ids.hpp"
#include "topembed/space.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(TOPEMBED_DATA_DIR) + "/" + name; }

// Order by direct counting over every point, independent of the library.
inline int brute_order(const topembed::Cover& c) {
  int best = -1;
  for (topembed::PointId x : c.ground) {
    int count = 0;
    for (const auto& s : c.sets) {
      for (topembed::PointId y : s) count += (y == x);
    }
    best = std::max(best, count - 1);
  }
  return best;
}

inline int brute_order_in(const topembed::Cover& c, const topembed::IdSet& region) {
  int best = -1;
  for (topembed::PointId x : region) {
    int count = 0;
    for (const auto& s : c.sets) {
      for (topembed::PointId y : s) count += (y == x);
    }
    best = std::max(best, count - 1);
  }
  return best;
}

inline bool brute_refines(const topembed::Cover& v, const topembed::Cover& u) {
  for (const auto& a : v.sets) {
    bool inside = false;
    for (const auto& b : u.sets) {
      bool all = true;
      for (auto x : a) all = all && std::find(b.begin(), b.end(), x) != b.end();
      inside = inside || all;
    }
    if (!inside) return false;
  }
  return true;
}

// Random cover of {0..n-1} with at most `max_sets` sets; every point lands in
// at least one set.
inline topembed::Cover random_cover(std::mt19937_64& rng, std::size_t n, std::size_t max_sets) {
  std::uniform_int_distribution<std::size_t> count(1, max_sets);
  const std::size_t k = count(rng);
  std::vector<std::vector<topembed::PointId>> sets(k);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::bernoulli_distribution extra(0.25);
  for (topembed::PointId x = 0; x < n; ++x) {
    sets[pick(rng)].push_back(x);
    for (std::size_t s = 0; s < k; ++s) {
      if (extra(rng)) sets[s].push_back(x);
    }
  }
  std::vector<topembed::IdSet> out;
  for (auto& s : sets) {
    if (!s.empty()) out.push_back(topembed::make_id_set(s));
  }
  return topembed::Cover::make(topembed::iota_ids(n), std::move(out));
}

inline topembed::FiniteMetricSpace random_plane_space(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  topembed::PointCloud cloud(n, 2);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    cloud(i, 0) = u(rng);
    cloud(i, 1) = u(rng);
    ids.push_back("p" + std::to_string(i));
  }
  return topembed::FiniteMetricSpace::from_coordinates(std::move(ids), cloud);
}

inline topembed::FiniteMetricSpace line_space(std::size_t n) {
  topembed::PointCloud cloud(n, 1);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    cloud(i, 0) = static_cast<double>(i) / static_cast<double>(n > 1 ? n - 1 : 1);
    ids.push_back("x" + std::to_string(i));
  }
  return topembed::FiniteMetricSpace::from_coordinates(std::move(ids), cloud);
}

}  // namespace testing
