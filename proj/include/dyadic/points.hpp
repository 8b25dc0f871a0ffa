#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "dyadic/errors.hpp"

namespace dyadic {

/// n points in d dimensions, stored row-major in one buffer.
class PointSet {
 public:
  explicit PointSet(int d = 1) : d_(d) {
    if (d < 1) throw ArgumentError("PointSet dimension must be >= 1");
  }
  PointSet(int d, std::vector<double> coords) : d_(d), coords_(std::move(coords)) {
    if (d < 1) throw ArgumentError("PointSet dimension must be >= 1");
    if (coords_.size() % static_cast<std::size_t>(d) != 0)
      throw ArgumentError("coordinate buffer is not a multiple of the dimension");
  }
  /// One-dimensional convenience constructor.
  static PointSet line(std::initializer_list<double> xs) { return PointSet(1, std::vector<double>(xs)); }

  int dim() const { return d_; }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(d_); }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }

  void push_back(std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(d_)) throw ArgumentError("point has wrong dimension");
    coords_.insert(coords_.end(), x.begin(), x.end());
  }
  void reserve(std::size_t n) { coords_.reserve(n * static_cast<std::size_t>(d_)); }

  const std::vector<double>& coords() const { return coords_; }

 private:
  int d_;
  std::vector<double> coords_;
};

}  // namespace dyadic
