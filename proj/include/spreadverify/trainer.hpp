#pragma once

#include "core.hpp"
#include "dataset.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace sv {

struct train_config {
    std::size_t trees = 5;  // m, odd
    std::size_t max_depth = 4;
    norm_index p = norm_index::infinity();
    double k = 0.01;
    std::size_t max_iter = 100;
    std::size_t partitions = 1;  // l
    std::uint64_t seed = 0;

    /// Throws input_error when the configuration cannot be trained on d features.
    void validate(std::size_t d) const;
};

/// CART trees on bootstrap samples: Gini impurity, ceil(sqrt(d)) candidate features per
/// split, midpoint thresholds. Deterministic in seed. Any tree count.
std::vector<decision_tree> train_trees(dataset const& D, std::size_t num_trees, std::size_t max_depth,
                                       std::uint64_t seed);

/// train_trees wrapped into a majority-voting ensemble; num_trees must be odd.
ensemble train_random_forest(dataset const& D, std::size_t num_trees, std::size_t max_depth,
                             std::uint64_t seed);

/// Number of features of `candidate` with a threshold within 2k (in L_p) of some threshold on
/// the same feature in `current`.
std::size_t feature_overlaps(decision_tree const& candidate, std::span<const decision_tree> current,
                             norm_index p, double k);

/// Index into `pool` of the tree with the fewest feature overlaps; first wins on ties.
std::size_t get_best_tree(std::span<const decision_tree> pool, std::span<const decision_tree> current,
                          norm_index p, double k);

/// Returns the next perturbation to apply to a pair of conflicting thresholds.
using delta_sampler = std::function<double()>;

/// Draws uniformly from (k, 2k].
delta_sampler uniform_delta_sampler(double k, std::mt19937_64& rng);

/// Push apart every cross-tree pair of same-feature thresholds within 2k, sweeping pairs in
/// (tree, preorder) order, until the trees are large-spread or max_iter sweeps have run.
/// Returns nullopt on failure. Only thresholds change.
std::optional<std::vector<decision_tree>> fix_forest(std::vector<decision_tree> trees, norm_index p,
                                                     double k, std::size_t max_iter,
                                                     delta_sampler const& next_delta);
std::optional<std::vector<decision_tree>> fix_forest(std::vector<decision_tree> trees, norm_index p,
                                                     double k, std::size_t max_iter, std::uint64_t seed);

/// Greedy selection of cfg.trees trees out of a 2m-tree forest, fixing overlaps as it goes.
/// Any returned ensemble is large-spread for (cfg.p, cfg.k).
std::optional<ensemble> train_large_spread(dataset const& D, train_config const& cfg);

/// Train one large-spread sub-ensemble per round-robin feature partition and merge them.
std::optional<ensemble> train_hierarchical(dataset const& D, train_config const& cfg);

/// Features assigned round-robin to `parts` groups.
std::vector<std::vector<std::size_t>> partition_features(std::size_t d, std::size_t parts);

/// Per-partition tree counts: as equal as possible, remainder to the first partitions.
std::vector<std::size_t> partition_tree_counts(std::size_t trees, std::size_t parts);

}  // namespace sv
