#pragma once

// Randomized invariant checks shared by the unit tests and the acceptance
// runner. Each returns the worst deviation seen over all generated cases.

#include <cstddef>
#include <cstdint>
#include <string>

namespace workreal::testing {

struct PropertyOutcome {
    std::string name;
    bool passed = true;
    std::size_t cases = 0;
    double worst = 0.0;
    std::string detail;
};

/// H(X, Y) = H(X) + H(Y | X) on random joints with zero cells.
PropertyOutcome entropy_chain_property(std::uint64_t seed, std::size_t cases = 500);

/// H(p) = H(q) + sum_j q_j H(p | group j) for random partitions.
PropertyOutcome grouping_property(std::uint64_t seed, std::size_t cases = 500);

/// Every joint and marginal built from random unitaries sums to one.
PropertyOutcome normalization_property(std::uint64_t seed, std::size_t cases = 300);

/// Marginals of the three-time joint agree with the two-time builders and
/// with the path-enumeration oracle.
PropertyOutcome marginalization_property(std::uint64_t seed, std::size_t cases = 300);

/// Sampled measurement records against the exact joint: chi-squared p-value
/// above `min_p_value` for every seed.
PropertyOutcome monte_carlo_property(std::uint64_t first_seed, std::size_t seeds = 20,
                                     std::uint64_t samples = 100000, double min_p_value = 1e-3);

/// Classical stochastic surrogates (no-middle statistics equal to the
/// marginal of the measured ones) never violate K_cor, K_cor' or K_en.
PropertyOutcome classical_surrogate_property(std::uint64_t seed, std::size_t cases = 200);

/// Jarzynski deviation for the total work through a measured middle time.
PropertyOutcome jarzynski_two_level_property(std::uint64_t seed, std::size_t draws = 100, double bound = 1e-10);

}  // namespace workreal::testing
