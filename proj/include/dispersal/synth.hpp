#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dispersal/geometry.hpp"

namespace dispersal {

struct ToySpec {
  std::size_t n_points = 200;
  std::size_t n_clusters = 8;
  double cluster_std = 1.0;
  double box_half_width = 20.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabeledToyDataset {
  std::vector<Point2> points;
  std::vector<std::size_t> true_labels;
  ToySpec spec;
};

/// Gaussian blobs around centres drawn uniformly in the box. Point i belongs
/// to cluster i % n_clusters. The noise is standard normal scaled by the
/// std, so datasets that share a seed differ only in spread.
LabeledToyDataset gen_toy2d(const ToySpec& spec);

struct MorphSpec {
  std::size_t n_shapes = 1000;
  std::size_t points_per_shape = 2500;
  double sphere_radius = 1.0;
  double cube_half_edge = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One sphere-to-cube blend: seeded uniform directions u, emitting
/// (1 - t) * r * u + t * h * u / max|u_i|.
PointCloud morph_shape(double t, const MorphSpec& spec, std::uint64_t shape_seed);

/// Morph parameter of shape i in an n-shape dataset.
double morph_parameter(std::size_t i, std::size_t n_shapes);

/// Direction seed of shape i.
std::uint64_t morph_shape_seed(const MorphSpec& spec, std::size_t i);

/// Shapes at t = i / (n_shapes - 1), each with its own direction seed.
std::vector<PointCloud> gen_morph_dataset(const MorphSpec& spec, unsigned threads = 1);

struct ElevationRange {
  double min_deg = 20.0;
  double max_deg = 30.0;
};

/// Azimuth uniform in [-alpha, alpha], elevation uniform in the range.
Viewpoint sample_viewpoint(double alpha_deg, std::uint64_t seed, ElevationRange elevation = {});

/// Azimuth bounds evaluated for viewer-centred augmentation.
inline constexpr double kViewpointAlphaGrid[] = {0, 15, 30, 45, 60, 75, 90};

/// Rotates each shape by its own sampled viewpoint (seed derived per shape).
std::vector<PointCloud> to_viewer_centered(std::span<const PointCloud> shapes, double alpha_deg,
                                           std::uint64_t seed, ElevationRange elevation = {});

}  // namespace dispersal
