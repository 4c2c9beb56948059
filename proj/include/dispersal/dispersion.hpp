#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dispersal/clustering.hpp"
#include "dispersal/distance_matrix.hpp"

namespace dispersal {

struct DispersionReport {
  std::size_t n_items = 0;
  std::size_t k = 0;
  double inertia = 0.0;
  double score = 0.0;  // inertia / n_items
  ClusterMethod method = ClusterMethod::kmedoids;
  std::uint64_t seed = 0;
  bool converged = true;
};

struct SweepCurve {
  std::vector<std::size_t> ks;
  std::vector<double> scores;
  ClusterMethod method = ClusterMethod::kmedoids;
  std::uint64_t seed = 0;
};

struct ElbowReport {
  std::size_t elbow_k = 0;
  std::vector<double> normalized_distance;
  SweepCurve curve;
};

/// Inclusive range start..stop with a positive step.
struct KRange {
  std::size_t start = 2;
  std::size_t stop = 100;
  std::size_t step = 2;

  std::vector<std::size_t> values() const;
};

/// Sweep used for small 2D datasets, and the one used for large shape sets.
inline constexpr KRange kToySweep{2, 100, 2};
inline constexpr KRange kLargeShapeSetSweep{50, 2000, 50};

/// Sum of distances from each item to its cluster's medoid.
double inertia(const DistanceMatrix& d, const ClusteringResult& clustering);

/// Clustering seed used for cluster count k inside a sweep.
std::uint64_t sweep_seed(std::uint64_t seed, std::size_t k);

struct DispersionOptions {
  APConfig ap;  // only read for affinity propagation
};

/// Clusters D with `method` and returns inertia / N. k is ignored for
/// affinity propagation.
DispersionReport dispersion_score(const DistanceMatrix& d, std::size_t k, ClusterMethod method,
                                  std::uint64_t seed, const DispersionOptions& options = {});

/// DS at every k (strictly increasing, each in [1, n]). All ks are validated
/// before any clustering runs. Not defined for affinity propagation.
SweepCurve sweep(const DistanceMatrix& d, std::span<const std::size_t> ks, ClusterMethod method,
                 std::uint64_t seed, unsigned threads = 1);

/// Kneedle without smoothing on a decreasing curve: min-max normalise both
/// axes and take the k maximising 1 - x - y. Throws NoElbowError when the
/// scores are constant or no point lies below the descending diagonal.
ElbowReport kneedle_elbow(const SweepCurve& curve);

struct AutoDispersion {
  std::optional<ElbowReport> elbow;  // empty for affinity propagation
  DispersionReport report;
};

/// Sweep, pick the elbow, report DS at the elbow k. For affinity propagation
/// this is a single run with no elbow.
AutoDispersion auto_ds(const DistanceMatrix& d, std::span<const std::size_t> ks, ClusterMethod method,
                       std::uint64_t seed, unsigned threads = 1, const DispersionOptions& options = {});

}  // namespace dispersal
