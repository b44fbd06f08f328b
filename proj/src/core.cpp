#include "spreadverify/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

namespace sv {

label label_from_int(long v) {
    if (v == 1) return label::positive;
    if (v == -1) return label::negative;
    throw input_error("label must be +1 or -1, got " + std::to_string(v));
}

std::string norm_index::to_string() const {
    if (is_inf()) return "inf";
    return std::to_string(m_p);
}

norm_index norm_index::parse(std::string_view text) {
    if (text == "inf" || text == "Inf" || text == "INF") return infinity();
    unsigned p = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
    if (ec != std::errc() || ptr != text.data() + text.size() || p == inf_order) {
        throw input_error("invalid norm index '" + std::string(text) + "' (expected 0, 1, 2, ... or inf)");
    }
    return norm_index(p);
}

attacker_model::attacker_model(norm_index p_, double k_) : p(p_), k(k_) {
    if (!(k >= 0.0)) throw input_error("attacker budget k must be >= 0");
}

interval hyper_rectangle::operator[](std::size_t feature) const {
    auto it = m_entries.find(feature);
    return it == m_entries.end() ? interval::full() : it->second;
}

void hyper_rectangle::set(std::size_t feature, interval iv) {
    if (iv.is_full()) {
        m_entries.erase(feature);
    } else {
        m_entries[feature] = iv;
    }
}

bool hyper_rectangle::is_empty() const {
    return std::any_of(m_entries.begin(), m_entries.end(),
                       [](auto const& e) { return e.second.is_empty(); });
}

decision_tree::decision_tree(std::vector<tree_node> nodes) : m_nodes(std::move(nodes)) {
    for (auto const& n : m_nodes) {
        if (!n.is_leaf()) {
            m_required_dimension = std::max<std::size_t>(m_required_dimension, n.feature + 1);
        }
    }
}

decision_tree decision_tree::leaf(label y) {
    tree_node n;
    n.leaf_label = y;
    return decision_tree(std::vector<tree_node>{n});
}

decision_tree decision_tree::split(std::size_t feature, double threshold, decision_tree const& left,
                                   decision_tree const& right) {
    if (!std::isfinite(threshold)) throw structural_error("split threshold must be finite");
    if (feature >= tree_node::npos) throw structural_error("feature index too large");

    std::vector<tree_node> nodes;
    nodes.reserve(1 + left.size() + right.size());
    tree_node root;
    root.feature = static_cast<std::uint32_t>(feature);
    root.threshold = threshold;
    root.left = 1;
    root.right = static_cast<std::uint32_t>(1 + left.size());
    nodes.push_back(root);

    auto append = [&](decision_tree const& sub, std::uint32_t offset) {
        for (tree_node n : sub.m_nodes) {
            if (!n.is_leaf()) {
                n.left += offset;
                n.right += offset;
            }
            nodes.push_back(n);
        }
    };
    append(left, 1);
    append(right, root.right);
    return decision_tree(std::move(nodes));
}

std::size_t decision_tree::num_leaves() const {
    return static_cast<std::size_t>(
        std::count_if(m_nodes.begin(), m_nodes.end(), [](auto const& n) { return n.is_leaf(); }));
}

std::size_t decision_tree::depth() const {
    // preorder layout: children always follow their parent
    std::vector<std::size_t> depth_of(m_nodes.size(), 0);
    std::size_t max_depth = 0;
    for (std::size_t i = 0; i != m_nodes.size(); ++i) {
        max_depth = std::max(max_depth, depth_of[i]);
        auto const& n = m_nodes[i];
        if (!n.is_leaf()) {
            depth_of[n.left] = depth_of[i] + 1;
            depth_of[n.right] = depth_of[i] + 1;
        }
    }
    return max_depth;
}

void decision_tree::set_threshold(std::size_t node_index, double v) {
    if (node_index >= m_nodes.size() || m_nodes[node_index].is_leaf()) {
        throw contract_error("set_threshold: node is not an internal node");
    }
    if (!std::isfinite(v)) throw structural_error("split threshold must be finite");
    m_nodes[node_index].threshold = v;
}

decision_tree decision_tree::remap_features(std::span<const std::size_t> mapping) const {
    std::vector<tree_node> nodes = m_nodes;
    for (auto& n : nodes) {
        if (n.is_leaf()) continue;
        if (n.feature >= mapping.size()) throw contract_error("remap_features: mapping too short");
        n.feature = static_cast<std::uint32_t>(mapping[n.feature]);
    }
    return decision_tree(std::move(nodes));
}

ensemble::ensemble(std::vector<decision_tree> trees, std::size_t d)
    : m_trees(std::move(trees)), m_d(d) {
    if (m_trees.empty() || m_trees.size() % 2 == 0) {
        throw structural_error("ensemble size must be odd, got " + std::to_string(m_trees.size()));
    }
    for (auto const& t : m_trees) {
        if (t.required_dimension() > m_d) {
            throw structural_error("tree tests feature " + std::to_string(t.required_dimension() - 1) +
                                   " but the ensemble has d = " + std::to_string(m_d));
        }
    }
}

std::size_t ensemble::total_nodes() const {
    std::size_t n = 0;
    for (auto const& t : m_trees) n += t.size();
    return n;
}

label predict_tree(decision_tree const& t, instance_view x) {
    if (x.size() < t.required_dimension()) {
        throw input_error("instance has " + std::to_string(x.size()) + " features, tree needs " +
                          std::to_string(t.required_dimension()));
    }
    std::size_t i = 0;
    while (!t.node(i).is_leaf()) {
        auto const& n = t.node(i);
        i = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return t.node(i).leaf_label;
}

label predict_ensemble(ensemble const& T, instance_view x) {
    if (x.size() != T.dimension()) {
        throw input_error("instance has " + std::to_string(x.size()) + " features, ensemble has d = " +
                          std::to_string(T.dimension()));
    }
    long votes = 0;
    for (auto const& t : T.trees()) votes += to_int(predict_tree(t, x));
    return votes > 0 ? label::positive : label::negative;
}

double dist_feature(double x_i, interval iv) {
    if (iv.is_empty()) throw contract_error("dist_feature on an EMPTY interval");
    if (iv.contains(x_i)) return 0.0;

    // nearest representable point of (lo, hi]: the successor of lo, or hi itself
    bool const up = x_i <= iv.lo;
    double const target = up ? std::nextafter(iv.lo, constants::inf) : iv.hi;
    double const away = up ? constants::inf : -constants::inf;
    double delta = target - x_i;
    if (delta == 0.0) delta = std::nextafter(0.0, away);
    // target - x_i may round toward x_i; step outward until the sum lands
    for (int i = 0; i != 64 && !iv.contains(x_i + delta); ++i) delta = std::nextafter(delta, away);
    if (!iv.contains(x_i + delta)) throw contract_error("dist_feature: interval too narrow for this magnitude");
    return delta;
}

void norm_accumulator::add(double component) {
    double const a = std::fabs(component);
    if (m_p.is_zero()) {
        m_raw += a != 0.0 ? 1.0 : 0.0;
    } else if (m_p.is_inf()) {
        m_raw = std::max(m_raw, a);
    } else if (m_p.order() == 1) {
        m_raw += a;
    } else {
        m_raw += std::pow(a, m_p.order());
    }
}

void norm_accumulator::replace(double old_component, double new_component) {
    if (old_component == new_component) return;
    if (m_p.is_inf()) {
        m_raw = std::max(m_raw, std::fabs(new_component));
        return;
    }
    norm_accumulator removed(m_p);
    removed.add(old_component);
    double const before = m_raw;
    m_raw -= removed.m_raw;
    // what is left after cancelling the only large term is rounding noise
    if (m_raw <= 16 * std::numeric_limits<double>::epsilon() * before) m_raw = 0.0;
    add(new_component);
    if (m_raw < 0.0) m_raw = 0.0;
}

void norm_accumulator::combine(norm_accumulator const& other) {
    if (!(other.m_p == m_p)) throw contract_error("combining norms of different order");
    if (m_p.is_inf()) {
        m_raw = std::max(m_raw, other.m_raw);
    } else {
        m_raw += other.m_raw;
    }
}

perturbation_norm norm_accumulator::value() const {
    if (m_p.is_zero() || m_p.is_inf() || m_p.order() == 1) return m_raw;
    if (m_p.order() == 2) return std::sqrt(m_raw);
    return std::pow(m_raw, 1.0 / m_p.order());
}

perturbation_norm norm(std::span<const double> deltas, norm_index p) {
    norm_accumulator acc(p);
    for (double d : deltas) acc.add(d);
    return acc.value();
}

namespace {

// raw accumulator state for a finished norm value; for p = 0 the norm is already a count
double raise(norm_index p, double v) {
    if (p.is_zero()) return v;
    norm_accumulator acc(p);
    acc.add(v);
    return acc.raw();
}

}  // namespace

perturbation_norm update_norm(norm_index p, perturbation_norm delta_norm, double old_component,
                              double new_component) {
    if (p.is_inf()) return std::max(delta_norm, std::fabs(new_component));
    norm_accumulator acc(p, raise(p, delta_norm));
    acc.replace(old_component, new_component);
    return acc.value();
}

perturbation_norm oplus(std::span<const double> norms, norm_index p) {
    norm_accumulator acc(p);
    for (double n : norms) {
        if (!std::isfinite(n) || n < 0.0) throw contract_error("oplus requires finite non-negative norms");
        if (p.is_zero()) {
            acc.combine(norm_accumulator(p, n));
        } else {
            acc.add(n);
        }
    }
    return acc.value();
}

double threshold_distance(norm_index p, double v, double w) {
    if (p.is_zero()) return v != w ? 1.0 : 0.0;
    return std::fabs(v - w);
}

perturbation_norm spread(std::span<const decision_tree> trees, norm_index p) {
    if (trees.size() < 2) return constants::inf;

    struct entry {
        std::uint32_t feature;
        double threshold;
        std::size_t tree;
    };
    std::vector<entry> entries;
    for (std::size_t i = 0; i != trees.size(); ++i) {
        for (auto const& n : trees[i].nodes()) {
            if (!n.is_leaf()) entries.push_back({n.feature, n.threshold, i});
        }
    }
    std::sort(entries.begin(), entries.end(), [](entry const& a, entry const& b) {
        return a.feature != b.feature ? a.feature < b.feature : a.threshold < b.threshold;
    });

    // The closest cross-tree pair on a feature is always adjacent in sorted order: any value
    // between them forms a cross-tree pair with one of the two ends that is at least as close.
    perturbation_norm best = constants::inf;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        auto const& a = entries[i - 1];
        auto const& b = entries[i];
        if (a.feature != b.feature || a.tree == b.tree) continue;
        best = std::min(best, threshold_distance(p, a.threshold, b.threshold));
    }
    return best;
}

bool is_large_spread(std::span<const decision_tree> trees, norm_index p, double k) {
    if (!(k >= 0.0)) throw input_error("attacker budget k must be >= 0");
    if (trees.size() < 2) return true;
    if (p.is_zero() && k > 0.0) {
        throw input_error("large-spread verification is not supported for p = 0 with k > 0");
    }
    return spread(trees, p) > 2.0 * k;
}

}  // namespace sv
