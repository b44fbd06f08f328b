#include "spreadverify/oracle.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace sv::oracle {

namespace {

void annotate(decision_tree const& t, std::size_t index, std::vector<interval>& box,
              std::vector<leaf_region>& out) {
    tree_node const& n = t.node(index);
    if (n.is_leaf()) {
        out.push_back({index, n.leaf_label, box});
        return;
    }
    interval const parent = box[n.feature];
    box[n.feature] = parent.left_of(n.threshold);
    annotate(t, n.left, box, out);
    box[n.feature] = parent.right_of(n.threshold);
    annotate(t, n.right, box, out);
    box[n.feature] = parent;
}

bool box_is_empty(std::vector<interval> const& box) {
    return std::any_of(box.begin(), box.end(), [](interval const& iv) { return iv.is_empty(); });
}

std::vector<double> box_distance(instance_view x, std::vector<interval> const& box) {
    std::vector<double> delta(x.size());
    for (std::size_t f = 0; f != x.size(); ++f) delta[f] = dist_feature(x[f], box[f]);
    return delta;
}

attack_witness make_witness(instance_view x, std::vector<interval> const& box, norm_index p) {
    auto delta = box_distance(x, box);
    attack_witness w;
    w.z.resize(x.size());
    for (std::size_t f = 0; f != x.size(); ++f) w.z[f] = x[f] + delta[f];
    w.norm_value = norm(delta, p);
    return w;
}

void check_capacity(std::span<const decision_tree> trees, config const& cfg) {
    std::uint64_t tuples = 1;
    for (auto const& t : trees) {
        std::uint64_t const leaves = t.num_leaves();
        if (tuples > cfg.max_leaf_tuples / leaves) {
            throw capacity_error("oracle: leaf-tuple count exceeds the configured bound of " +
                                 std::to_string(cfg.max_leaf_tuples));
        }
        tuples *= leaves;
    }
}

/// Depth-first search over leaf tuples for the cheapest box in which at least
/// `required_wrong` trees predict != y. Cost only grows as boxes shrink, so partial tuples
/// whose cost already exceeds the limit are cut.
class tuple_search {
public:
    tuple_search(std::span<const decision_tree> trees, norm_index p, instance_view x, label y,
                 std::size_t required_wrong, double budget)
        : m_p(p), m_x(x), m_y(y), m_required(required_wrong), m_budget(budget) {
        for (auto const& t : trees) {
            if (x.size() < t.required_dimension()) throw input_error("oracle: instance dimension mismatch");
            m_leaves.push_back(annotate_leaves(t, x.size()));
        }
    }

    std::optional<attack_witness> run() {
        std::vector<interval> box(m_x.size(), interval::full());
        visit(0, box, 0);
        if (!m_best_box) return std::nullopt;
        return make_witness(m_x, *m_best_box, m_p);
    }

private:
    void visit(std::size_t tree, std::vector<interval> const& box, std::size_t wrong) {
        if (wrong + (m_leaves.size() - tree) < m_required) return;
        double const cost = norm(box_distance(m_x, box), m_p);
        if (cost > m_budget || (m_best_box && cost >= m_best_cost)) return;
        if (tree == m_leaves.size()) {
            m_best_cost = cost;
            m_best_box = box;
            return;
        }
        std::vector<interval> next(box.size());
        for (auto const& leaf : m_leaves[tree]) {
            for (std::size_t f = 0; f != box.size(); ++f) next[f] = box[f].intersect(leaf.box[f]);
            if (box_is_empty(next)) continue;
            visit(tree + 1, next, wrong + (leaf.y != m_y ? 1 : 0));
        }
    }

    norm_index m_p;
    instance_view m_x;
    label m_y;
    std::size_t m_required;
    double m_budget;
    std::vector<std::vector<leaf_region>> m_leaves;
    double m_best_cost = constants::inf;
    std::optional<std::vector<interval>> m_best_box;
};

}  // namespace

std::vector<leaf_region> annotate_leaves(decision_tree const& t, std::size_t d) {
    if (d < t.required_dimension()) throw input_error("annotate_leaves: d smaller than the tree needs");
    std::vector<interval> box(d, interval::full());
    std::vector<leaf_region> out;
    annotate(t, 0, box, out);
    return out;
}

std::vector<perturbation_norm> naive_reachable(decision_tree const& t, norm_index p, double k,
                                               instance_view x, label y) {
    std::vector<perturbation_norm> out;
    for (auto const& leaf : annotate_leaves(t, x.size())) {
        if (leaf.y == y || box_is_empty(leaf.box)) continue;
        double const cost = norm(box_distance(x, leaf.box), p);
        if (cost <= k) out.push_back(cost);
    }
    return out;
}

exact_result exact_robust(ensemble const& T, norm_index p, double k, instance_view x, label y,
                          config const& cfg) {
    if (!(k >= 0.0)) throw input_error("attacker budget k must be >= 0");
    if (x.size() != T.dimension()) throw input_error("oracle: instance dimension mismatch");
    check_capacity(T.trees(), cfg);
    // A tuple with majority label != y: more than half of the trees vote against y. This
    // also catches a misprediction on x itself (cost 0).
    auto best = tuple_search(T.trees(), p, x, y, T.size() / 2 + 1, k).run();
    exact_result r;
    r.robust = !best.has_value();
    r.witness = std::move(best);
    return r;
}

std::optional<attack_witness> minimal_attack(ensemble const& T, norm_index p, instance_view x, label y,
                                             config const& cfg) {
    if (x.size() != T.dimension()) throw input_error("oracle: instance dimension mismatch");
    check_capacity(T.trees(), cfg);
    return tuple_search(T.trees(), p, x, y, T.size() / 2 + 1, constants::inf).run();
}

std::optional<attack_witness> minimal_joint_attack(std::span<const decision_tree> trees, norm_index p,
                                                   instance_view x, label y, config const& cfg) {
    check_capacity(trees, cfg);
    return tuple_search(trees, p, x, y, trees.size(), constants::inf).run();
}

attack_split split_attack(decision_tree const& t, decision_tree const& t2, instance_view x,
                          instance_view z, label y) {
    if (x.size() != z.size()) throw contract_error("split_attack: x and z differ in dimension");
    if (predict_tree(t, z) == y || predict_tree(t2, z) == y) {
        throw contract_error("split_attack: z must be an attack against both trees");
    }

    std::set<std::size_t> flipped;
    std::size_t i = 0;
    while (!t.node(i).is_leaf()) {
        auto const& n = t.node(i);
        bool const x_left = x[n.feature] <= n.threshold;
        bool const z_left = z[n.feature] <= n.threshold;
        if (x_left != z_left) flipped.insert(n.feature);
        i = z_left ? n.left : n.right;
    }

    attack_split s;
    s.features.assign(flipped.begin(), flipped.end());
    s.delta.assign(x.size(), 0.0);
    s.delta_prime.assign(x.size(), 0.0);
    s.first.assign(x.begin(), x.end());
    s.second.assign(z.begin(), z.end());
    for (std::size_t f = 0; f != x.size(); ++f) {
        if (flipped.count(f)) {
            s.delta[f] = z[f] - x[f];
            s.first[f] = z[f];
            s.second[f] = x[f];
        } else {
            s.delta_prime[f] = z[f] - x[f];
        }
    }
    return s;
}

bool exists_large_spread_subset(std::span<const decision_tree> trees, std::size_t s, norm_index p,
                                double k, config const& cfg) {
    std::size_t const m = trees.size();
    if (m > cfg.max_subset_trees) {
        throw capacity_error("oracle: subset search limited to " + std::to_string(cfg.max_subset_trees) +
                             " trees");
    }
    if (s > m) return false;
    if (s <= 1) return true;

    std::vector<bool> chosen(m, false);
    std::fill(chosen.begin(), chosen.begin() + static_cast<long>(s), true);
    std::vector<decision_tree> subset;
    do {
        subset.clear();
        for (std::size_t i = 0; i != m; ++i) {
            if (chosen[i]) subset.push_back(trees[i]);
        }
        if (is_large_spread(subset, p, k)) return true;
    } while (std::prev_permutation(chosen.begin(), chosen.end()));
    return false;
}

}  // namespace sv::oracle
