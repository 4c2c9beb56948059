#pragma once

#include <cstdint>
#include <span>

namespace dispersal {

/// Pairwise (cascade) summation in index order. The result depends only on
/// the values and their order, never on threading.
double pairwise_sum(std::span<const double> values);

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace dispersal
