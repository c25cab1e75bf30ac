#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "topembed/ids.hpp"

namespace topembed {

/// A table `index -> R^dim` stored coordinate-major (structure of arrays), so
/// the distance kernels can stream one coordinate across many points.
///
/// Used both for reference realizations and for maps evaluated on samples.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t count, std::size_t dim) : count_(count), dim_(dim), soa_(count * dim) {}

  std::size_t size() const { return count_; }
  std::size_t dim() const { return dim_; }

  double operator()(std::size_t index, std::size_t axis) const { return soa_[axis * count_ + index]; }
  double& operator()(std::size_t index, std::size_t axis) { return soa_[axis * count_ + index]; }

  std::vector<double> point(std::size_t index) const {
    std::vector<double> p(dim_);
    for (std::size_t k = 0; k < dim_; ++k) p[k] = (*this)(index, k);
    return p;
  }

  void set_point(std::size_t index, std::span<const double> p) {
    for (std::size_t k = 0; k < dim_; ++k) (*this)(index, k) = p[k];
  }

  std::span<const double> soa() const { return soa_; }

  /// Sup-norm distances from `query` to every point.
  void supnorm_row(std::span<const double> query, std::span<double> out) const;

  /// Sup-norm distance between two stored points.
  double supnorm(std::size_t a, std::size_t b) const;

  /// The rows listed in `ids`, in that order.
  PointCloud gather(const IdSet& ids) const;

  bool operator==(const PointCloud&) const = default;

 private:
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> soa_;
};

/// Largest sup-norm of a point in the cloud.
double max_supnorm(const PointCloud& cloud);

}  // namespace topembed
