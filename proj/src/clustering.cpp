#include "dispersal/clustering.hpp"
#include "dispersal/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace dispersal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_k(const DistanceMatrix& d, std::size_t k, const char* who) {
  if (k < 1 || k > d.size())
    throw InvalidArgument(std::string(who) + ": k = " + std::to_string(k) + " outside [1, " +
                          std::to_string(d.size()) + "]");
}

// Labels each item with its nearest medoid (medoids sorted ascending, so the
// lowest cluster id wins ties). A medoid always labels itself.
std::vector<std::size_t> assign_nearest(const DistanceMatrix& d, std::span<const std::size_t> medoids) {
  const std::size_t n = d.size();
  std::vector<std::size_t> labels(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = kInf;
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      const double v = d(i, medoids[c]);
      if (v < best) {
        best = v;
        labels[i] = c;
      }
    }
  }
  for (std::size_t c = 0; c < medoids.size(); ++c) labels[medoids[c]] = c;
  return labels;
}

ClusteringResult from_medoids(const DistanceMatrix& d, std::vector<std::size_t> medoids, ClusterMethod method) {
  std::sort(medoids.begin(), medoids.end());
  ClusteringResult result;
  result.method = method;
  result.labels = assign_nearest(d, medoids);
  result.medoids = std::move(medoids);
  result.inertia = total_inertia(d, result.labels, result.medoids);
  return result;
}

// Nearest and second-nearest medoid distances per item, used to price swaps.
struct NearestCache {
  std::vector<double> first;
  std::vector<std::size_t> first_slot;
  std::vector<double> second;

  void rebuild(const DistanceMatrix& d, std::span<const std::size_t> medoids) {
    const std::size_t n = d.size();
    first.assign(n, kInf);
    first_slot.assign(n, 0);
    second.assign(n, kInf);
    for (std::size_t o = 0; o < n; ++o) {
      for (std::size_t s = 0; s < medoids.size(); ++s) {
        const double v = d(o, medoids[s]);
        if (v < first[o]) {
          second[o] = first[o];
          first[o] = v;
          first_slot[o] = s;
        } else if (v < second[o]) {
          second[o] = v;
        }
      }
    }
  }

  double total() const {
    double sum = 0.0;
    for (double v : first) sum += v;
    return sum;
  }
};

double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace

std::string_view to_string(ClusterMethod method) {
  switch (method) {
    case ClusterMethod::kmedoids: return "kmedoids";
    case ClusterMethod::hierarchical: return "hierarchical";
    case ClusterMethod::affinity_propagation: return "affinity_propagation";
  }
  return "unknown";
}

ClusterMethod parse_cluster_method(std::string_view name) {
  if (name == "kmedoids") return ClusterMethod::kmedoids;
  if (name == "hierarchical") return ClusterMethod::hierarchical;
  if (name == "ap" || name == "affinity_propagation") return ClusterMethod::affinity_propagation;
  throw InvalidArgument("unknown clustering method '" + std::string(name) + "'");
}

double total_inertia(const DistanceMatrix& d, std::span<const std::size_t> labels,
                     std::span<const std::size_t> medoids) {
  if (labels.size() != d.size())
    throw InvalidArgument("inertia: " + std::to_string(labels.size()) + " labels for a matrix of size " +
                          std::to_string(d.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= medoids.size()) throw InvalidArgument("inertia: label without a medoid");
    const std::size_t m = medoids[labels[i]];
    if (m >= d.size()) throw InvalidArgument("inertia: medoid index out of range");
    sum += d(i, m);
  }
  return sum;
}

void validate(const ClusteringResult& result, std::size_t n) {
  const std::size_t k = result.k();
  if (result.labels.size() != n) throw InvalidArgument("labels length differs from item count");
  if (k < 1 || k > n) throw InvalidArgument("cluster count outside [1, n]");
  std::vector<bool> seen(n, false);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t m = result.medoids[c];
    if (m >= n) throw InvalidArgument("medoid index out of range");
    if (seen[m]) throw InvalidArgument("duplicate medoid");
    seen[m] = true;
    if (result.labels[m] != c) throw InvalidArgument("medoid does not carry its own cluster label");
  }
  for (std::size_t label : result.labels)
    if (label >= k) throw InvalidArgument("label outside 0..k-1");
}

std::vector<std::size_t> kmeanspp_medoids(const DistanceMatrix& d, std::size_t k, std::uint64_t seed) {
  check_k(d, k, "kmeans++");
  const std::size_t n = d.size();
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen;
  std::vector<bool> is_chosen(n, false);

  const auto first = std::min(n - 1, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n)));
  chosen.push_back(first);
  is_chosen[first] = true;

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = d(i, first);

  while (chosen.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!is_chosen[i]) total += nearest[i] * nearest[i];

    std::size_t pick = n;
    if (total > 0.0) {
      const double target = unit_uniform(rng) * total;
      double cumulative = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (is_chosen[i]) continue;
        cumulative += nearest[i] * nearest[i];
        if (cumulative > target) {
          pick = i;
          break;
        }
      }
    } else {
      // Every remaining item coincides with a pick; take the lowest index.
      unit_uniform(rng);
    }
    if (pick == n)
      for (std::size_t i = 0; i < n && pick == n; ++i)
        if (!is_chosen[i]) pick = i;

    chosen.push_back(pick);
    is_chosen[pick] = true;
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], d(i, pick));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

ClusteringResult pam(const DistanceMatrix& d, std::vector<std::size_t> medoids) {
  const std::size_t n = d.size();
  check_k(d, medoids.size(), "pam");
  std::sort(medoids.begin(), medoids.end());
  if (std::adjacent_find(medoids.begin(), medoids.end()) != medoids.end() || medoids.back() >= n)
    throw InvalidArgument("pam: initial medoids must be distinct dataset indices");

  std::vector<bool> is_medoid(n, false);
  for (std::size_t m : medoids) is_medoid[m] = true;

  NearestCache cache;
  cache.rebuild(d, medoids);
  double current = cache.total();

  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t s = 0; s < medoids.size() && !improved; ++s) {
      for (std::size_t h = 0; h < n; ++h) {
        if (is_medoid[h]) continue;
        const auto candidate = d.row(h);
        double swapped = 0.0;
        for (std::size_t o = 0; o < n; ++o) {
          const double keep = cache.first_slot[o] == s ? cache.second[o] : cache.first[o];
          swapped += std::min(candidate[o], keep);
        }
        if (swapped < current) {
          is_medoid[medoids[s]] = false;
          is_medoid[h] = true;
          medoids[s] = h;
          std::sort(medoids.begin(), medoids.end());
          cache.rebuild(d, medoids);
          current = cache.total();
          improved = true;
          break;
        }
      }
    }
  }
  return from_medoids(d, std::move(medoids), ClusterMethod::kmedoids);
}

ClusteringResult kmedoids(const DistanceMatrix& d, std::size_t k, std::uint64_t seed) {
  check_k(d, k, "kmedoids");
  const std::size_t n = d.size();
  if (k == n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return from_medoids(d, std::move(all), ClusterMethod::kmedoids);
  }
  if (k == 1) {
    // The 1-medoid is the row-sum minimiser; lowest index on ties.
    std::size_t best = 0;
    double best_sum = kInf;
    for (std::size_t m = 0; m < n; ++m) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += d(i, m);
      if (sum < best_sum) {
        best_sum = sum;
        best = m;
      }
    }
    return from_medoids(d, {best}, ClusterMethod::kmedoids);
  }
  ClusteringResult best = pam(d, kmeanspp_medoids(d, k, seed));
  for (std::size_t r = 1; r < kKMedoidsStarts; ++r) {
    ClusteringResult candidate = pam(d, kmeanspp_medoids(d, k, mix_seed(seed, r)));
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

ClusteringResult hierarchical(const DistanceMatrix& d, std::size_t k) {
  check_k(d, k, "hierarchical");
  const std::size_t n = d.size();

  // Slot i holds the cluster whose smallest member is i.
  std::vector<double> link(d.entries().begin(), d.entries().end());
  std::vector<bool> active(n, true);
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};

  for (std::size_t clusters = n; clusters > k; --clusters) {
    double best = kInf;
    std::size_t ba = n, bb = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        if (link[a * n + b] < best) {
          best = link[a * n + b];
          ba = a;
          bb = b;
        }
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (!active[x] || x == ba || x == bb) continue;
      const double merged = std::max(link[ba * n + x], link[bb * n + x]);
      link[ba * n + x] = merged;
      link[x * n + ba] = merged;
    }
    members[ba].insert(members[ba].end(), members[bb].begin(), members[bb].end());
    members[bb].clear();
    active[bb] = false;
  }

  ClusteringResult result;
  result.method = ClusterMethod::hierarchical;
  result.labels.assign(n, 0);
  for (std::size_t slot = 0; slot < n; ++slot) {
    if (!active[slot]) continue;
    const std::size_t id = result.medoids.size();
    auto& group = members[slot];
    std::sort(group.begin(), group.end());
    std::size_t medoid = group.front();
    double best_sum = kInf;
    for (std::size_t m : group) {
      double sum = 0.0;
      for (std::size_t j : group) sum += d(m, j);
      if (sum < best_sum) {
        best_sum = sum;
        medoid = m;
      }
    }
    for (std::size_t i : group) result.labels[i] = id;
    result.medoids.push_back(medoid);
  }
  result.inertia = total_inertia(d, result.labels, result.medoids);
  return result;
}

void APConfig::validate() const {
  if (!(preference_percentile > 0.0 && preference_percentile <= 100.0))
    throw InvalidArgument("affinity propagation: preference percentile must be in (0, 100]");
  if (!(damping >= 0.5 && damping < 1.0)) throw InvalidArgument("affinity propagation: damping must be in [0.5, 1)");
  if (max_iterations < 1) throw InvalidArgument("affinity propagation: max_iterations must be positive");
  if (convergence_window < 1) throw InvalidArgument("affinity propagation: convergence_window must be positive");
}

double ap_preference(std::span<const double> off_diagonal_similarities, double preference_percentile) {
  if (off_diagonal_similarities.empty()) throw InvalidArgument("ap_preference: no similarities");
  return percentile({off_diagonal_similarities.begin(), off_diagonal_similarities.end()}, preference_percentile);
}

std::vector<double> ap_similarity(const DistanceMatrix& d, double preference_percentile) {
  const std::size_t n = d.size();
  const auto entries = d.entries();
  const double count = static_cast<double>(entries.size());
  double mean = 0.0;
  for (double v : entries) mean += v;
  mean /= count;
  double var = 0.0;
  for (double v : entries) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / count);
  if (!(sigma > 0.0)) throw DegenerateMatrixError("degenerate matrix: all distances are zero");

  std::vector<double> s(n * n, 0.0);
  std::vector<double> off;
  off.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        s[i * n + j] = std::exp(-d(i, j) / sigma);
        off.push_back(s[i * n + j]);
      }
  const double preference = ap_preference(off, preference_percentile);
  for (std::size_t i = 0; i < n; ++i) s[i * n + i] = preference;
  return s;
}

ClusteringResult affinity_propagation(const DistanceMatrix& d, const APConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t n = d.size();
  if (n < 2) throw InvalidArgument("affinity propagation needs at least two items");

  std::vector<double> s = ap_similarity(d, cfg.preference_percentile);

  // Tiny seeded jitter breaks the symmetry between duplicate items.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : s)
    v += (std::numeric_limits<double>::epsilon() * v + std::numeric_limits<double>::min() * 100.0) * normal(rng);

  std::vector<double> r(n * n, 0.0), a(n * n, 0.0), column(n);
  const double keep = cfg.damping;
  const double take = 1.0 - cfg.damping;

  std::vector<bool> exemplar(n, false), previous(n, false);
  int stable = 0;
  bool converged = false;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    // Responsibilities.
    for (std::size_t i = 0; i < n; ++i) {
      double first = -kInf, second = -kInf;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double v = a[i * n + k] + s[i * n + k];
        if (v > first) {
          second = first;
          first = v;
          arg = k;
        } else if (v > second) {
          second = v;
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double fresh = s[i * n + k] - (k == arg ? second : first);
        r[i * n + k] = keep * r[i * n + k] + take * fresh;
      }
    }
    // Availabilities.
    for (std::size_t k = 0; k < n; ++k) {
      double sum = r[k * n + k];
      for (std::size_t i = 0; i < n; ++i)
        if (i != k) sum += std::max(0.0, r[i * n + k]);
      column[k] = sum;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const double fresh = i == k ? column[k] - r[k * n + k]
                                    : std::min(0.0, column[k] - std::max(0.0, r[i * n + k]));
        a[i * n + k] = keep * a[i * n + k] + take * fresh;
      }
    }

    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
      exemplar[k] = a[k * n + k] + r[k * n + k] > 0.0;
      any = any || exemplar[k];
    }
    stable = (it > 0 && exemplar == previous) ? stable + 1 : 1;
    previous = exemplar;
    if (any && stable >= cfg.convergence_window) {
      converged = true;
      break;
    }
  }

  std::vector<std::size_t> medoids;
  for (std::size_t k = 0; k < n; ++k)
    if (exemplar[k]) medoids.push_back(k);
  if (medoids.empty()) {
    std::size_t best = 0;
    double best_value = -kInf;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = a[k * n + k] + r[k * n + k];
      if (v > best_value) {
        best_value = v;
        best = k;
      }
    }
    medoids.push_back(best);
    converged = false;
  }
  ClusteringResult result = from_medoids(d, std::move(medoids), ClusterMethod::affinity_propagation);
  result.converged = converged;
  return result;
}

ClusteringResult brute_force_kmedoids(const DistanceMatrix& d, std::size_t k) {
  check_k(d, k, "brute_force_kmedoids");
  const std::size_t n = d.size();
  constexpr double kGuard = 1e6;
  double combos = 1.0;
  for (std::size_t i = 0; i < k; ++i) combos = combos * static_cast<double>(n - i) / static_cast<double>(i + 1);
  if (combos > kGuard + 0.5)
    throw InvalidArgument("brute_force_kmedoids: C(" + std::to_string(n) + ", " + std::to_string(k) +
                          ") exceeds 10^6 subsets");

  std::vector<std::size_t> subset(k);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  std::vector<std::size_t> best = subset;
  double best_cost = kInf;
  for (;;) {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double nearest = kInf;
      for (std::size_t m : subset) nearest = std::min(nearest, d(i, m));
      cost += nearest;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = subset;
    }
    // Next k-subset in lexicographic order.
    std::size_t pos = k;
    while (pos > 0 && subset[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t j = pos; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  return from_medoids(d, std::move(best), ClusterMethod::kmedoids);
}

}  // namespace dispersal
