#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dispersal/distance_matrix.hpp"

namespace dispersal {

enum class ClusterMethod { kmedoids, hierarchical, affinity_propagation };

std::string_view to_string(ClusterMethod method);
/// Accepts "kmedoids", "hierarchical", "ap" / "affinity_propagation".
ClusterMethod parse_cluster_method(std::string_view name);

/// Partition of a dataset with one representative item (medoid) per cluster.
///
/// Cluster ids are 0..k-1, ordered by medoid index for k-medoids and affinity
/// propagation and by smallest member index for hierarchical clustering.
/// medoids[c] always carries label c.
struct ClusteringResult {
  ClusterMethod method = ClusterMethod::kmedoids;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> medoids;
  double inertia = 0.0;
  bool converged = true;

  std::size_t k() const { return medoids.size(); }
};

/// Sum over items of D[i][medoid of its cluster], accumulated in index order.
/// Throws InvalidArgument if the labels do not fit the matrix.
double total_inertia(const DistanceMatrix& d, std::span<const std::size_t> labels,
                     std::span<const std::size_t> medoids);

/// Checks the ClusteringResult invariants against an n-item dataset; throws
/// InvalidArgument describing the first violation.
void validate(const ClusteringResult& result, std::size_t n);

/// k-means++ seeding adapted to medoids: first pick uniform, each next pick
/// with probability proportional to D(i, nearest pick)^2. Returned sorted.
std::vector<std::size_t> kmeanspp_medoids(const DistanceMatrix& d, std::size_t k, std::uint64_t seed);

/// Independent k-means++ starts per kmedoids call; start 0 uses the given
/// seed, start r uses mix_seed(seed, r). Best inertia wins, earliest on ties.
inline constexpr std::size_t kKMedoidsStarts = 4;

/// PAM from k-means++ starts: first strictly improving (medoid, candidate)
/// swap in index order is applied and the scan restarts, until a full scan
/// finds none. Items go to the nearest medoid, ties to the lowest cluster id.
ClusteringResult kmedoids(const DistanceMatrix& d, std::size_t k, std::uint64_t seed);

/// PAM refinement from explicit initial medoids (distinct, in range).
ClusteringResult pam(const DistanceMatrix& d, std::vector<std::size_t> initial_medoids);

/// Complete-linkage agglomeration down to k clusters. Ties merge the
/// lexicographically smallest pair of cluster ids, where a cluster's id is
/// its smallest member index.
ClusteringResult hierarchical(const DistanceMatrix& d, std::size_t k);

struct APConfig {
  double preference_percentile = 4.0;  // q in (0, 100]
  double damping = 0.5;                // [0.5, 1)
  int max_iterations = 200;
  int convergence_window = 15;

  void validate() const;
};

/// q used for the synthetic morph dataset and for large shape collections.
inline constexpr double kAPSyntheticPercentile = 4.0;
inline constexpr double kAPLargeShapeSetPercentile = 60.0;

/// Similarity matrix fed to affinity propagation: exp(-D / sigma) off the
/// diagonal, sigma the population standard deviation of all n*n entries of D.
/// The diagonal holds the preference. Throws DegenerateMatrixError if sigma == 0.
std::vector<double> ap_similarity(const DistanceMatrix& d, double preference_percentile);

/// Preference for a given q: the q-th percentile (linear interpolation) of
/// the off-diagonal similarities.
double ap_preference(std::span<const double> off_diagonal_similarities, double preference_percentile);

/// Responsibility/availability message passing with damping. Exemplars
/// become medoids and k is emergent. A run that does not stabilise within
/// max_iterations is returned with converged == false.
ClusteringResult affinity_propagation(const DistanceMatrix& d, const APConfig& cfg, std::uint64_t seed);

/// Exhaustive search over all k-subsets; ties keep the lexicographically
/// smallest medoid set. Throws InvalidArgument when C(n, k) > 10^6.
ClusteringResult brute_force_kmedoids(const DistanceMatrix& d, std::size_t k);

}  // namespace dispersal
