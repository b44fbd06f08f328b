#pragma once

// Random instance generators shared by the differential checks, the benchmark harness and
// the test suites.

#include "core.hpp"
#include "dataset.hpp"

#include <random>
#include <vector>

namespace sv::synth {

/// Random tree of depth <= max_depth over d features, thresholds uniform in [lo, hi).
decision_tree random_tree(std::mt19937_64& rng, std::size_t d, std::size_t max_depth, double lo = 0.0,
                          double hi = 20.0);

/// Random odd-size ensemble together with a budget k that makes it large-spread for every
/// p >= 1. Regenerates until the spread is positive.
struct spread_case {
    ensemble trees;
    double k;
};
spread_case random_large_spread_case(std::mt19937_64& rng, std::size_t m, std::size_t d, std::size_t max_depth);

enum class placement { uniform, near_threshold, on_threshold };

/// Uniform draw in [lo, hi)^d, then per tested feature: nothing (uniform), a threshold of
/// that feature moved by up to 2k (near_threshold), or a threshold itself or one ulp either
/// side of it (on_threshold).
instance placed_instance(std::mt19937_64& rng, ensemble const& T, double k, placement where, double lo = -2.0,
                         double hi = 22.0);

/// placed_instance with a placement drawn uniformly.
instance random_instance(std::mt19937_64& rng, ensemble const& T, double k, double lo = -2.0, double hi = 22.0);

/// Large-spread ensemble with thresholds on disjoint slots of a 3k-spaced grid in [0, 1).
ensemble grid_spread_ensemble(std::mt19937_64& rng, std::size_t m, std::size_t depth, std::size_t d, double k);

/// Uniform [0, 1)^d points labelled by whether the first min(3, d) coordinates sum past
/// their midpoint.
dataset separable_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d);

}  // namespace sv::synth
