#pragma once

// Exponential-time reference implementations. Nothing here shares a code path with the
// optimized traversal in verifier.hpp: leaf regions are annotated per leaf from scratch and
// attacks are searched over explicit leaf tuples.

#include "core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sv::oracle {

struct config {
    /// Upper bound on the product of per-tree leaf counts.
    std::uint64_t max_leaf_tuples = 1'000'000;
    /// Upper bound on the ensemble size for subset enumeration.
    std::size_t max_subset_trees = 20;
};

struct attack_witness {
    instance z;
    perturbation_norm norm_value = 0.0;
};

struct exact_result {
    bool robust = true;
    /// Minimum-norm evasion within budget, present iff !robust.
    std::optional<attack_witness> witness;
};

/// Dense hyper-rectangle annotating one leaf.
struct leaf_region {
    std::size_t node = 0;
    label y = label::positive;
    std::vector<interval> box;
};

/// Annotate every leaf independently by intersecting the splits on its root path; leaves
/// come out in preorder.
std::vector<leaf_region> annotate_leaves(decision_tree const& t, std::size_t d);

/// Per-leaf recomputation of the wrong-leaf norms within k, in preorder leaf order.
std::vector<perturbation_norm> naive_reachable(decision_tree const& t, norm_index p, double k,
                                               instance_view x, label y);

exact_result exact_robust(ensemble const& T, norm_index p, double k, instance_view x, label y,
                          config const& cfg = {});

/// Global minimum-norm z with predict_ensemble(T, z) != y, unbudgeted.
std::optional<attack_witness> minimal_attack(ensemble const& T, norm_index p, instance_view x, label y,
                                             config const& cfg = {});

/// Minimum-norm z on which every listed tree predicts != y.
std::optional<attack_witness> minimal_joint_attack(std::span<const decision_tree> trees, norm_index p,
                                                   instance_view x, label y, config const& cfg = {});

struct attack_split {
    std::vector<std::size_t> features;  // F: features whose side flips along t's path on z
    std::vector<double> delta;          // z - x on F, 0 elsewhere
    std::vector<double> delta_prime;    // z - x off F, 0 on F
    instance first;                     // x + delta, taken component-wise from z and x
    instance second;                    // x + delta_prime
};

/// Split a joint attack z on {t, t2} into support-disjoint parts, visiting t only.
/// Throws contract_error unless both trees predict != y on z.
attack_split split_attack(decision_tree const& t, decision_tree const& t2, instance_view x,
                          instance_view z, label y);

/// Whether some s-subset of trees is large-spread, by enumerating all C(m, s) subsets.
bool exists_large_spread_subset(std::span<const decision_tree> trees, std::size_t s, norm_index p,
                                double k, config const& cfg = {});

}  // namespace sv::oracle
