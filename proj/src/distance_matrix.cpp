#include "dispersal/distance_matrix.hpp"

#include <cmath>

namespace dispersal {

DistanceMatrix::DistanceMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {
  if (n == 0) throw InvalidArgument("distance matrix must have at least one item");
}

DistanceMatrix DistanceMatrix::from_entries(std::size_t n, std::vector<double> entries) {
  if (n == 0) throw DataError("distance matrix must have at least one item");
  if (entries.size() != n * n)
    throw DataError("distance matrix of size " + std::to_string(n) + " needs " + std::to_string(n * n) +
                    " entries, got " + std::to_string(entries.size()));
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i * n + i] != 0.0) throw DataError("non-zero diagonal at " + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = entries[i * n + j];
      if (!std::isfinite(v) || v < 0.0)
        throw DataError("entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is negative or not finite");
      if (v != entries[j * n + i])
        throw DataError("asymmetric entries at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
  DistanceMatrix d(n);
  d.entries_ = std::move(entries);
  // Normalise -0.0 on the diagonal.
  for (std::size_t i = 0; i < n; ++i) d.entries_[i * n + i] = 0.0;
  return d;
}

void DistanceMatrix::set_symmetric(std::size_t i, std::size_t j, double value) {
  if (i == j) throw InvalidArgument("set_symmetric: diagonal entries are fixed at zero");
  if (!std::isfinite(value) || value < 0.0) throw InvalidArgument("set_symmetric: distance must be finite and >= 0");
  entries_[i * n_ + j] = value;
  entries_[j * n_ + i] = value;
}

DistanceMatrix pairwise_sqeuclidean(std::span<const Point2> points, unsigned threads) {
  return pairwise_matrix(points, [](const Point2& a, const Point2& b) { return squared_euclidean(a, b); }, threads);
}

DistanceMatrix pairwise_sqeuclidean(std::span<const std::vector<double>> rows, unsigned threads) {
  return pairwise_matrix(
      rows, [](const std::vector<double>& a, const std::vector<double>& b) { return squared_euclidean(a, b); },
      threads);
}

DistanceMatrix pairwise_chamfer(std::span<const PointCloud> clouds, unsigned threads) {
  return pairwise_matrix(clouds, [](const PointCloud& a, const PointCloud& b) { return chamfer_distance(a, b); },
                         threads);
}

}  // namespace dispersal
