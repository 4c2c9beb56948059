#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dispersal/error.hpp"
#include "dispersal/geometry.hpp"
#include "dispersal/parallel.hpp"

namespace dispersal {

/// Symmetric n x n matrix of pairwise distances, stored row-major.
/// Zero diagonal, exact symmetry, finite non-negative entries.
class DistanceMatrix {
 public:
  /// n x n zero matrix.
  explicit DistanceMatrix(std::size_t n);

  /// Adopts row-major entries after checking the matrix axioms. Throws
  /// DataError if any axiom fails.
  static DistanceMatrix from_entries(std::size_t n, std::vector<double> entries);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {entries_.data() + i * n_, n_}; }
  std::span<const double> entries() const { return entries_; }

  /// Sets both (i, j) and (j, i). Off-diagonal only; value must be finite and >= 0.
  void set_symmetric(std::size_t i, std::size_t j, double value);

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

/// A distance-function failure on a specific pair of items.
class PairError : public DataError {
 public:
  PairError(std::size_t i, std::size_t j, const std::string& what)
      : DataError("distance(" + std::to_string(i) + ", " + std::to_string(j) + "): " + what), i_(i), j_(j) {}

  std::size_t first() const { return i_; }
  std::size_t second() const { return j_; }

 private:
  std::size_t i_;
  std::size_t j_;
};

/// Evaluates d on the strict upper triangle and mirrors it; the diagonal is
/// zero without calling d. Rows are distributed over `threads` workers; every
/// entry is computed independently, so the result does not depend on the
/// thread count.
template <typename Item, typename Distance>
DistanceMatrix pairwise_matrix(std::span<const Item> items, Distance&& d, unsigned threads = 1) {
  const std::size_t n = items.size();
  if (n == 0) throw InvalidArgument("pairwise_matrix: empty dataset");
  DistanceMatrix out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double value;
      try {
        value = d(items[i], items[j]);
      } catch (const std::exception& e) {
        throw PairError(i, j, e.what());
      }
      if (!(value >= 0.0) || value == std::numeric_limits<double>::infinity())
        throw PairError(i, j, "distance is negative or not finite");
      out.set_symmetric(i, j, value);
    }
  });
  return out;
}

DistanceMatrix pairwise_sqeuclidean(std::span<const Point2> points, unsigned threads = 1);
DistanceMatrix pairwise_sqeuclidean(std::span<const std::vector<double>> rows, unsigned threads = 1);
DistanceMatrix pairwise_chamfer(std::span<const PointCloud> clouds, unsigned threads = 1);

}  // namespace dispersal
