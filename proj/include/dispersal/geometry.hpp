#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dispersal {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// An ordered, non-empty set of finite 3D points (one shape sample).
class PointCloud {
 public:
  /// Throws InvalidArgument when empty or when any coordinate is not finite.
  explicit PointCloud(std::vector<Point3> points);

  std::size_t size() const { return points_.size(); }
  std::span<const Point3> points() const { return points_; }
  const Point3& operator[](std::size_t i) const { return points_[i]; }

  friend bool operator==(const PointCloud& a, const PointCloud& b);

 private:
  std::vector<Point3> points_;
};

/// Camera viewpoint in degrees. Azimuth is kept in (-180, 180].
class Viewpoint {
 public:
  Viewpoint(double azimuth_deg, double elevation_deg);

  double azimuth_deg() const { return azimuth_; }
  double elevation_deg() const { return elevation_; }

 private:
  double azimuth_;
  double elevation_;
};

/// Sum of squared coordinate differences. Throws InvalidArgument on a
/// dimension mismatch or empty input.
double squared_euclidean(std::span<const double> a, std::span<const double> b);
double squared_euclidean(const Point2& a, const Point2& b);

/// Chamfer distance: mean squared nearest-neighbour distance X->Y plus the
/// same for Y->X. Exact brute-force search; each directional mean is a
/// pairwise sum in point order, so CD(X, Y) == CD(Y, X) bitwise.
double chamfer_distance(const PointCloud& x, const PointCloud& y);

/// Rotates every point by Rz(-azimuth) * Ry(-elevation).
PointCloud rotate_cloud(const PointCloud& cloud, const Viewpoint& view);

}  // namespace dispersal
