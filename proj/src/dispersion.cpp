#include "dispersal/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dispersal {

namespace {

constexpr std::uint64_t kSweepSeedMultiplier = 0x9E3779B97F4A7C15ULL;

// Below this the curve is treated as lying on the diagonal.
constexpr double kElbowTolerance = 1e-12;

void check_sweep_ks(const DistanceMatrix& d, std::span<const std::size_t> ks) {
  if (ks.empty()) throw InvalidArgument("sweep: no cluster counts given");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1 || ks[i] > d.size())
      throw InvalidArgument("sweep: k = " + std::to_string(ks[i]) + " outside [1, " + std::to_string(d.size()) + "]");
    if (i > 0 && ks[i] <= ks[i - 1]) throw InvalidArgument("sweep: cluster counts must be strictly increasing");
  }
}

ClusteringResult cluster(const DistanceMatrix& d, std::size_t k, ClusterMethod method, std::uint64_t seed,
                         const DispersionOptions& options) {
  switch (method) {
    case ClusterMethod::kmedoids: return kmedoids(d, k, seed);
    case ClusterMethod::hierarchical: return hierarchical(d, k);
    case ClusterMethod::affinity_propagation: return affinity_propagation(d, options.ap, seed);
  }
  throw InvalidArgument("unknown clustering method");
}

}  // namespace

std::vector<std::size_t> KRange::values() const {
  if (step == 0) throw InvalidArgument("k range step must be positive");
  if (start < 1 || stop < start) throw InvalidArgument("k range must satisfy 1 <= start <= stop");
  std::vector<std::size_t> ks;
  for (std::size_t k = start; k <= stop; k += step) ks.push_back(k);
  return ks;
}

double inertia(const DistanceMatrix& d, const ClusteringResult& clustering) {
  return total_inertia(d, clustering.labels, clustering.medoids);
}

std::uint64_t sweep_seed(std::uint64_t seed, std::size_t k) {
  return seed ^ (kSweepSeedMultiplier * static_cast<std::uint64_t>(k));
}

DispersionReport dispersion_score(const DistanceMatrix& d, std::size_t k, ClusterMethod method, std::uint64_t seed,
                                  const DispersionOptions& options) {
  const ClusteringResult c = cluster(d, k, method, seed, options);
  DispersionReport report;
  report.n_items = d.size();
  report.k = c.k();
  report.inertia = inertia(d, c);
  report.score = report.inertia / static_cast<double>(report.n_items);
  report.method = method;
  report.seed = seed;
  report.converged = c.converged;
  return report;
}

SweepCurve sweep(const DistanceMatrix& d, std::span<const std::size_t> ks, ClusterMethod method, std::uint64_t seed,
                 unsigned threads) {
  if (method == ClusterMethod::affinity_propagation)
    throw InvalidArgument("sweep: affinity propagation has no cluster-count parameter");
  check_sweep_ks(d, ks);

  SweepCurve curve;
  curve.ks.assign(ks.begin(), ks.end());
  curve.scores.assign(ks.size(), 0.0);
  curve.method = method;
  curve.seed = seed;
  parallel_for(ks.size(), threads, [&](std::size_t i) {
    curve.scores[i] = dispersion_score(d, ks[i], method, sweep_seed(seed, ks[i])).score;
  });
  return curve;
}

ElbowReport kneedle_elbow(const SweepCurve& curve) {
  const std::size_t m = curve.ks.size();
  if (m != curve.scores.size()) throw InvalidArgument("kneedle: ks and scores differ in length");
  if (m < 3) throw InvalidArgument("kneedle: need at least three sweep points");

  const auto [lo_it, hi_it] = std::minmax_element(curve.scores.begin(), curve.scores.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw NoElbowError("no elbow: the score curve is constant");
  const double k0 = static_cast<double>(curve.ks.front());
  const double k_span = static_cast<double>(curve.ks.back()) - k0;

  ElbowReport report;
  report.curve = curve;
  report.normalized_distance.resize(m);
  std::size_t best = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = (static_cast<double>(curve.ks[i]) - k0) / k_span;
    const double y = (curve.scores[i] - lo) / (hi - lo);
    report.normalized_distance[i] = 1.0 - x - y;
    if (report.normalized_distance[i] > report.normalized_distance[best]) best = i;
  }
  if (!(report.normalized_distance[best] > kElbowTolerance))
    throw NoElbowError("no elbow: the curve does not bend below its chord");
  report.elbow_k = curve.ks[best];
  return report;
}

AutoDispersion auto_ds(const DistanceMatrix& d, std::span<const std::size_t> ks, ClusterMethod method,
                       std::uint64_t seed, unsigned threads, const DispersionOptions& options) {
  AutoDispersion out;
  if (method == ClusterMethod::affinity_propagation) {
    out.report = dispersion_score(d, 0, method, seed, options);
    return out;
  }
  out.elbow = kneedle_elbow(sweep(d, ks, method, seed, threads));
  out.report = dispersion_score(d, out.elbow->elbow_k, method, sweep_seed(seed, out.elbow->elbow_k), options);
  out.report.seed = seed;
  return out;
}

}  // namespace dispersal
