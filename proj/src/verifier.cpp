#include "spreadverify/verifier.hpp"

#include <algorithm>
#include <cmath>

namespace sv {

namespace {

/// Raw-domain pruning bound for "norm > k". Finite p >= 1 gets a relative margin so that
/// rounding in the subtract-then-add update never prunes a leaf whose exact norm is <= k.
double prune_bound(norm_index p, double k) {
    if (p.is_zero() || p.is_inf()) return k;
    norm_accumulator acc(p);
    acc.add(k);
    return acc.raw() * (1.0 + 1e-9);
}

class reachability_visit {
public:
    reachability_visit(decision_tree const& t, norm_index p, double k, instance_view x, label y)
        : m_tree(t), m_p(p), m_k(k), m_bound(prune_bound(p, k)), m_x(x), m_y(y) {
        if (!(k >= 0.0)) throw input_error("attacker budget k must be >= 0");
        if (x.size() < t.required_dimension()) {
            throw input_error("instance has " + std::to_string(x.size()) + " features, tree needs " +
                              std::to_string(t.required_dimension()));
        }
    }

    template <typename OnLeaf>
    void run(OnLeaf&& on_leaf) {
        visit(0, norm_accumulator(m_p), on_leaf);
    }

private:
    template <typename OnLeaf>
    void visit(std::size_t index, norm_accumulator delta, OnLeaf& on_leaf) {
        tree_node const& n = m_tree.node(index);
        if (n.is_leaf()) {
            if (n.leaf_label != m_y && delta.value() <= m_k) on_leaf(delta);
            return;
        }

        interval const saved = m_rect[n.feature];
        double const x_f = m_x[n.feature];
        double const delta_f = dist_feature(x_f, saved);

        descend(n.feature, saved.left_of(n.threshold), n.left, x_f, delta_f, delta, on_leaf);
        descend(n.feature, saved.right_of(n.threshold), n.right, x_f, delta_f, delta, on_leaf);
        m_rect.set(n.feature, saved);
    }

    template <typename OnLeaf>
    void descend(std::size_t feature, interval child, std::size_t child_index, double x_f, double delta_f,
                 norm_accumulator delta, OnLeaf& on_leaf) {
        if (child.is_empty()) return;
        double const child_delta_f = dist_feature(x_f, child);
        delta.replace(delta_f, child_delta_f);
        if (delta.raw() > m_bound) return;
        m_rect.set(feature, child);
        visit(child_index, delta, on_leaf);
    }

    decision_tree const& m_tree;
    norm_index m_p;
    double m_k;
    double m_bound;
    instance_view m_x;
    label m_y;
    hyper_rectangle m_rect;
};

/// Minimum wrong-leaf norm of one tree within budget, in the raw accumulator domain.
std::optional<norm_accumulator> min_wrong_leaf(decision_tree const& t, norm_index p, double k,
                                               instance_view x, label y) {
    std::optional<norm_accumulator> best;
    reachability_visit(t, p, k, x, y).run([&](norm_accumulator const& d) {
        if (!best || d.raw() < best->raw()) best = d;
    });
    return best;
}

struct composition {
    bool stable;
    std::optional<perturbation_norm> attack_norm;
    std::vector<perturbation_norm> tree_norms;
};

composition compose(ensemble const& T, norm_index p, double k, instance_view x, label y) {
    if (x.size() != T.dimension()) {
        throw input_error("instance has " + std::to_string(x.size()) + " features, ensemble has d = " +
                          std::to_string(T.dimension()));
    }
    std::vector<norm_accumulator> attackable;
    composition out{true, std::nullopt, {}};
    out.tree_norms.reserve(T.size());
    for (auto const& t : T.trees()) {
        auto best = min_wrong_leaf(t, p, k, x, y);
        out.tree_norms.push_back(best ? best->value() : constants::inf);
        if (best) attackable.push_back(*best);
    }

    std::size_t const needed = (T.size() - 1) / 2 + 1;
    if (attackable.size() < needed) return out;

    std::sort(attackable.begin(), attackable.end(),
              [](auto const& a, auto const& b) { return a.raw() < b.raw(); });
    norm_accumulator composed(p);
    for (std::size_t i = 0; i != needed; ++i) composed.combine(attackable[i]);
    if (composed.value() <= k) {
        out.stable = false;
        out.attack_norm = composed.value();
    }
    return out;
}

}  // namespace

perturbation_norm reachability_result::min() const {
    if (distances.empty()) return constants::inf;
    return *std::min_element(distances.begin(), distances.end());
}

reachability_result reachable(decision_tree const& t, norm_index p, double k, instance_view x, label y) {
    reachability_result out;
    reachability_visit(t, p, k, x, y).run([&](norm_accumulator const& d) { out.distances.push_back(d.value()); });
    return out;
}

bool robust_tree(decision_tree const& t, norm_index p, double k, instance_view x, label y) {
    if (predict_tree(t, x) != y) return false;
    return !min_wrong_leaf(t, p, k, x, y).has_value();
}

void require_large_spread(ensemble const& T, norm_index p, double k) {
    if (!is_large_spread(T, p, k)) throw not_large_spread_error(spread(T, p), 2.0 * k);
}

bool stable_ensemble(ensemble const& T, norm_index p, double k, instance_view x, label y) {
    require_large_spread(T, p, k);
    return compose(T, p, k, x, y).stable;
}

verification_verdict robust_ensemble_unchecked(ensemble const& T, norm_index p, double k,
                                               instance_view x, label y) {
    verification_verdict v;
    v.predicted = predict_ensemble(T, x);
    // stability is relative to the ensemble's own prediction
    auto c = compose(T, p, k, x, v.predicted);
    v.stable = c.stable;
    v.robust = v.stable && v.predicted == y;
    v.min_attack_norm = c.attack_norm;
    v.tree_norms = std::move(c.tree_norms);
    return v;
}

verification_verdict robust_ensemble(ensemble const& T, norm_index p, double k, instance_view x, label y) {
    require_large_spread(T, p, k);
    return robust_ensemble_unchecked(T, p, k, x, y);
}

double robustness_score(ensemble const& T, norm_index p, double k, dataset const& test) {
    if (test.empty()) throw input_error("robustness score of an empty dataset is undefined");
    require_large_spread(T, p, k);
    std::size_t robust = 0;
    for (std::size_t i = 0; i != test.size(); ++i) {
        if (robust_ensemble_unchecked(T, p, k, test.row(i), test.label_of(i)).robust) ++robust;
    }
    return static_cast<double>(robust) / static_cast<double>(test.size());
}

}  // namespace sv
