#pragma once

#include "core.hpp"
#include "dataset.hpp"

#include <optional>
#include <vector>

namespace sv {

/// Norms of the minimal perturbations reaching each wrong-label leaf within budget, in
/// traversal (left-to-right leaf) order. Empty means no wrong-label leaf is reachable.
struct reachability_result {
    std::vector<perturbation_norm> distances;

    bool empty() const { return distances.empty(); }
    /// +inf when empty.
    perturbation_norm min() const;
};

struct verification_verdict {
    bool robust = false;
    bool stable = false;
    label predicted = label::positive;
    /// Composed norm of the cheapest attack flipping a majority, when one fits the budget.
    std::optional<perturbation_norm> min_attack_norm;
    /// Minimal wrong-leaf norm per tree (+inf when the tree cannot be attacked within k).
    std::vector<perturbation_norm> tree_norms;
};

/// Single O(n) visit with one global hyper-rectangle and one scalar norm. Subtrees are
/// pruned once the norm exceeds k or an interval becomes EMPTY.
reachability_result reachable(decision_tree const& t, norm_index p, double k, instance_view x, label y);

bool robust_tree(decision_tree const& t, norm_index p, double k, instance_view x, label y);

/// Throws not_large_spread_error unless spread(T, p) > 2k.
void require_large_spread(ensemble const& T, norm_index p, double k);

/// Stability of a large-spread ensemble. Checks the large-spread precondition first.
bool stable_ensemble(ensemble const& T, norm_index p, double k, instance_view x, label y);

verification_verdict robust_ensemble(ensemble const& T, norm_index p, double k, instance_view x, label y);

/// Same as robust_ensemble but trusts the caller to have checked the precondition once
/// (see require_large_spread). Safe to call concurrently on a shared ensemble.
verification_verdict robust_ensemble_unchecked(ensemble const& T, norm_index p, double k,
                                               instance_view x, label y);

/// Fraction of robust instances.
double robustness_score(ensemble const& T, norm_index p, double k, dataset const& test);

}  // namespace sv
