#include "dispersal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dispersal/error.hpp"
#include "dispersal/numeric.hpp"

namespace dispersal {

namespace {

bool finite(const Point3& p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z); }

double normalize_azimuth(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

// Squared distance to the nearest point of `targets`, given as coordinate
// columns. Four independent lanes; min is exact, so lane order is irrelevant.
double nearest_squared(const Point3& p, const double* xs, const double* ys, const double* zs, std::size_t n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double m0 = inf, m1 = inf, m2 = inf, m3 = inf;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const double dx0 = p.x - xs[j], dy0 = p.y - ys[j], dz0 = p.z - zs[j];
    const double dx1 = p.x - xs[j + 1], dy1 = p.y - ys[j + 1], dz1 = p.z - zs[j + 1];
    const double dx2 = p.x - xs[j + 2], dy2 = p.y - ys[j + 2], dz2 = p.z - zs[j + 2];
    const double dx3 = p.x - xs[j + 3], dy3 = p.y - ys[j + 3], dz3 = p.z - zs[j + 3];
    const double d0 = dx0 * dx0 + dy0 * dy0 + dz0 * dz0;
    const double d1 = dx1 * dx1 + dy1 * dy1 + dz1 * dz1;
    const double d2 = dx2 * dx2 + dy2 * dy2 + dz2 * dz2;
    const double d3 = dx3 * dx3 + dy3 * dy3 + dz3 * dz3;
    m0 = d0 < m0 ? d0 : m0;
    m1 = d1 < m1 ? d1 : m1;
    m2 = d2 < m2 ? d2 : m2;
    m3 = d3 < m3 ? d3 : m3;
  }
  for (; j < n; ++j) {
    const double dx = p.x - xs[j], dy = p.y - ys[j], dz = p.z - zs[j];
    const double d = dx * dx + dy * dy + dz * dz;
    m0 = d < m0 ? d : m0;
  }
  return std::min(std::min(m0, m1), std::min(m2, m3));
}

double mean_nearest_squared(const PointCloud& from, const PointCloud& to) {
  const std::size_t n = to.size();
  std::vector<double> xs(n), ys(n), zs(n);
  for (std::size_t j = 0; j < n; ++j) {
    xs[j] = to[j].x;
    ys[j] = to[j].y;
    zs[j] = to[j].z;
  }
  std::vector<double> nearest(from.size());
  for (std::size_t i = 0; i < from.size(); ++i)
    nearest[i] = nearest_squared(from[i], xs.data(), ys.data(), zs.data(), n);
  return pairwise_sum(nearest) / static_cast<double>(from.size());
}

}  // namespace

PointCloud::PointCloud(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidArgument("point cloud must contain at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (!finite(points_[i])) throw InvalidArgument("point " + std::to_string(i) + " has a non-finite coordinate");
}

bool operator==(const PointCloud& a, const PointCloud& b) {
  return std::equal(a.points_.begin(), a.points_.end(), b.points_.begin(), b.points_.end(),
                    [](const Point3& p, const Point3& q) { return p.x == q.x && p.y == q.y && p.z == q.z; });
}

Viewpoint::Viewpoint(double azimuth_deg, double elevation_deg) {
  if (!std::isfinite(azimuth_deg) || !std::isfinite(elevation_deg))
    throw InvalidArgument("viewpoint angles must be finite");
  azimuth_ = normalize_azimuth(azimuth_deg);
  elevation_ = elevation_deg;
}

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw InvalidArgument("squared_euclidean: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  if (a.empty()) throw InvalidArgument("squared_euclidean: zero-dimensional vectors");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum;
}

double squared_euclidean(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double chamfer_distance(const PointCloud& x, const PointCloud& y) {
  return mean_nearest_squared(x, y) + mean_nearest_squared(y, x);
}

PointCloud rotate_cloud(const PointCloud& cloud, const Viewpoint& view) {
  constexpr double to_rad = std::numbers::pi / 180.0;
  const double az = -view.azimuth_deg() * to_rad;
  const double el = -view.elevation_deg() * to_rad;
  const double ca = std::cos(az), sa = std::sin(az);
  const double ce = std::cos(el), se = std::sin(el);

  // R = Rz(az) * Ry(el)
  const double r00 = ca * ce, r01 = -sa, r02 = ca * se;
  const double r10 = sa * ce, r11 = ca, r12 = sa * se;
  const double r20 = -se, r21 = 0.0, r22 = ce;

  std::vector<Point3> out;
  out.reserve(cloud.size());
  for (const Point3& p : cloud.points()) {
    out.push_back({r00 * p.x + r01 * p.y + r02 * p.z,
                   r10 * p.x + r11 * p.y + r12 * p.z,
                   r20 * p.x + r21 * p.y + r22 * p.z});
  }
  return PointCloud(std::move(out));
}

}  // namespace dispersal
