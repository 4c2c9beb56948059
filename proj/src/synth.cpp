#include "dispersal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "dispersal/error.hpp"
#include "dispersal/numeric.hpp"
#include "dispersal/parallel.hpp"

namespace dispersal {

namespace {

constexpr std::uint64_t kViewpointStream = 0x5649455750ULL;  // "VIEWP"

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform_in(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

}  // namespace

void ToySpec::validate() const {
  if (n_clusters < 1) throw InvalidArgument("toy spec: n_clusters must be positive");
  if (n_points < n_clusters) throw InvalidArgument("toy spec: n_points must be >= n_clusters");
  if (!(cluster_std > 0.0) || !std::isfinite(cluster_std)) throw InvalidArgument("toy spec: std must be > 0");
  if (!(box_half_width > 0.0) || !std::isfinite(box_half_width))
    throw InvalidArgument("toy spec: box_half_width must be > 0");
}

LabeledToyDataset gen_toy2d(const ToySpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::vector<Point2> centers(spec.n_clusters);
  for (Point2& c : centers) {
    c.x = uniform_in(rng, -spec.box_half_width, spec.box_half_width);
    c.y = uniform_in(rng, -spec.box_half_width, spec.box_half_width);
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledToyDataset out;
  out.spec = spec;
  out.points.reserve(spec.n_points);
  out.true_labels.reserve(spec.n_points);
  for (std::size_t i = 0; i < spec.n_points; ++i) {
    const std::size_t c = i % spec.n_clusters;
    const double dx = normal(rng);
    const double dy = normal(rng);
    out.points.push_back({centers[c].x + spec.cluster_std * dx, centers[c].y + spec.cluster_std * dy});
    out.true_labels.push_back(c);
  }
  return out;
}

void MorphSpec::validate() const {
  if (n_shapes < 1) throw InvalidArgument("morph spec: n_shapes must be positive");
  if (points_per_shape < 1) throw InvalidArgument("morph spec: points_per_shape must be positive");
  if (!(sphere_radius > 0.0) || !std::isfinite(sphere_radius))
    throw InvalidArgument("morph spec: sphere_radius must be > 0");
  if (!(cube_half_edge > 0.0) || !std::isfinite(cube_half_edge))
    throw InvalidArgument("morph spec: cube_half_edge must be > 0");
}

PointCloud morph_shape(double t, const MorphSpec& spec, std::uint64_t shape_seed) {
  spec.validate();
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("morph_shape: t must be in [0, 1]");

  std::mt19937_64 rng(shape_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point3> points;
  points.reserve(spec.points_per_shape);
  for (std::size_t i = 0; i < spec.points_per_shape; ++i) {
    double ux = normal(rng), uy = normal(rng), uz = normal(rng);
    const double norm = std::sqrt(ux * ux + uy * uy + uz * uz);
    if (norm > 0.0) {
      ux /= norm;
      uy /= norm;
      uz /= norm;
    } else {
      ux = 0.0;
      uy = 0.0;
      uz = 1.0;
    }
    const double inf_norm = std::max({std::abs(ux), std::abs(uy), std::abs(uz)});
    const double sphere = spec.sphere_radius;
    const double cube = spec.cube_half_edge / inf_norm;
    // Pure endpoints are emitted without blending so they are exact.
    const double scale = t == 0.0 ? sphere : t == 1.0 ? cube : (1.0 - t) * sphere + t * cube;
    points.push_back({scale * ux, scale * uy, scale * uz});
  }
  return PointCloud(std::move(points));
}

double morph_parameter(std::size_t i, std::size_t n_shapes) {
  if (n_shapes <= 1) return 0.0;
  if (i + 1 == n_shapes) return 1.0;
  return static_cast<double>(i) / static_cast<double>(n_shapes - 1);
}

std::uint64_t morph_shape_seed(const MorphSpec& spec, std::size_t i) { return mix_seed(spec.seed, i); }

std::vector<PointCloud> gen_morph_dataset(const MorphSpec& spec, unsigned threads) {
  spec.validate();
  std::vector<std::optional<PointCloud>> slots(spec.n_shapes);
  parallel_for(spec.n_shapes, threads, [&](std::size_t i) {
    slots[i].emplace(morph_shape(morph_parameter(i, spec.n_shapes), spec, morph_shape_seed(spec, i)));
  });
  std::vector<PointCloud> shapes;
  shapes.reserve(spec.n_shapes);
  for (auto& s : slots) shapes.push_back(std::move(*s));
  return shapes;
}

Viewpoint sample_viewpoint(double alpha_deg, std::uint64_t seed, ElevationRange elevation) {
  if (!(alpha_deg >= 0.0 && alpha_deg <= 180.0)) throw InvalidArgument("sample_viewpoint: alpha must be in [0, 180]");
  if (!(elevation.min_deg <= elevation.max_deg) || !std::isfinite(elevation.min_deg) ||
      !std::isfinite(elevation.max_deg))
    throw InvalidArgument("sample_viewpoint: invalid elevation range");
  std::mt19937_64 rng(seed);
  const double azimuth = alpha_deg == 0.0 ? 0.0 : uniform_in(rng, -alpha_deg, alpha_deg);
  const double elev = uniform_in(rng, elevation.min_deg, elevation.max_deg);
  return Viewpoint(azimuth, elev);
}

std::vector<PointCloud> to_viewer_centered(std::span<const PointCloud> shapes, double alpha_deg, std::uint64_t seed,
                                           ElevationRange elevation) {
  std::vector<PointCloud> out;
  out.reserve(shapes.size());
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const Viewpoint v = sample_viewpoint(alpha_deg, mix_seed(seed ^ kViewpointStream, i), elevation);
    out.push_back(rotate_cloud(shapes[i], v));
  }
  return out;
}

}  // namespace dispersal
