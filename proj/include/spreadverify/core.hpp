#pragma once

#include "errors.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sv {

namespace constants {
constexpr double inf = std::numeric_limits<double>::infinity();
}

using instance = std::vector<double>;
using instance_view = std::span<const double>;

enum class label : int { negative = -1, positive = 1 };

constexpr label flip(label y) { return y == label::positive ? label::negative : label::positive; }
constexpr int to_int(label y) { return static_cast<int>(y); }
label label_from_int(long v);

/// Index p of an L_p norm: 0 (nonzero count), a positive integer, or infinity.
class norm_index {
public:
    static constexpr unsigned inf_order = std::numeric_limits<unsigned>::max();

    constexpr norm_index() = default;
    constexpr explicit norm_index(unsigned p) : m_p(p) {}
    static constexpr norm_index infinity() { return norm_index(inf_order); }

    constexpr bool is_inf() const { return m_p == inf_order; }
    constexpr bool is_zero() const { return m_p == 0; }
    constexpr unsigned order() const { return m_p; }

    /// "0", "1", "2", ... or "inf".
    std::string to_string() const;
    static norm_index parse(std::string_view text);

    friend constexpr bool operator==(norm_index, norm_index) = default;

private:
    unsigned m_p = inf_order;
};

/// The threat model A_{p,k}: every z with ||z - x||_p <= k.
struct attacker_model {
    attacker_model(norm_index p, double k);
    norm_index p;
    double k;
};

/// Scalar L_p norm of a perturbation; always >= 0, possibly +inf.
using perturbation_norm = double;

/// Half-open interval (lo, hi]. lo >= hi is the EMPTY interval.
struct interval {
    double lo = -constants::inf;
    double hi = constants::inf;

    static constexpr interval full() { return {}; }

    bool is_empty() const { return !(lo < hi); }
    bool is_full() const { return lo == -constants::inf && hi == constants::inf; }
    bool contains(double x) const { return lo < x && x <= hi; }

    /// Restriction to the left branch of a split on v: (lo, min(hi, v)].
    interval left_of(double v) const { return {lo, hi < v ? hi : v}; }
    /// Restriction to the right branch of a split on v: (max(lo, v), hi].
    interval right_of(double v) const { return {lo > v ? lo : v, hi}; }
    interval intersect(interval other) const {
        return {lo > other.lo ? lo : other.lo, hi < other.hi ? hi : other.hi};
    }

    friend bool operator==(interval, interval) = default;
};

/// Sparse product of intervals. Features without an entry are FULL; FULL entries are
/// never stored.
class hyper_rectangle {
public:
    interval operator[](std::size_t feature) const;
    void set(std::size_t feature, interval iv);
    void restrict_to(std::size_t feature, interval iv) { set(feature, (*this)[feature].intersect(iv)); }

    std::size_t stored() const { return m_entries.size(); }
    bool is_empty() const;
    auto begin() const { return m_entries.begin(); }
    auto end() const { return m_entries.end(); }

    friend bool operator==(hyper_rectangle const&, hyper_rectangle const&) = default;

private:
    std::unordered_map<std::size_t, interval> m_entries;
};

struct tree_node {
    static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();

    std::uint32_t feature = npos;  // npos marks a leaf
    double threshold = 0.0;
    std::uint32_t left = npos;
    std::uint32_t right = npos;
    label leaf_label = label::positive;

    bool is_leaf() const { return feature == npos; }
    friend bool operator==(tree_node const&, tree_node const&) = default;
};

/// Binary threshold tree with +-1 leaves. Nodes are stored in preorder with the root at
/// index 0; an instance goes left when x[feature] <= threshold.
class decision_tree {
public:
    decision_tree() : m_nodes{tree_node{}} {}

    static decision_tree leaf(label y);
    static decision_tree split(std::size_t feature, double threshold, decision_tree const& left,
                               decision_tree const& right);

    std::span<const tree_node> nodes() const { return m_nodes; }
    tree_node const& node(std::size_t i) const { return m_nodes[i]; }
    tree_node const& root() const { return m_nodes.front(); }
    std::size_t size() const { return m_nodes.size(); }
    std::size_t num_leaves() const;
    std::size_t depth() const;

    /// 1 + the largest tested feature index, 0 for a single leaf.
    std::size_t required_dimension() const { return m_required_dimension; }

    /// Only thresholds are mutable after construction.
    void set_threshold(std::size_t node_index, double v);

    /// Renumber every tested feature f to mapping[f].
    decision_tree remap_features(std::span<const std::size_t> mapping) const;

    friend bool operator==(decision_tree const&, decision_tree const&) = default;

private:
    explicit decision_tree(std::vector<tree_node> nodes);

    std::vector<tree_node> m_nodes;
    std::size_t m_required_dimension = 0;
};

/// Majority-voting ensemble of an odd number of trees over d features.
class ensemble {
public:
    ensemble(std::vector<decision_tree> trees, std::size_t d);

    std::span<const decision_tree> trees() const { return m_trees; }
    decision_tree const& tree(std::size_t i) const { return m_trees[i]; }
    std::size_t size() const { return m_trees.size(); }
    std::size_t dimension() const { return m_d; }
    std::size_t total_nodes() const;

    friend bool operator==(ensemble const&, ensemble const&) = default;

private:
    std::vector<decision_tree> m_trees;
    std::size_t m_d;
};

label predict_tree(decision_tree const& t, instance_view x);
label predict_ensemble(ensemble const& T, instance_view x);

/// Signed perturbation delta_i moving x_i to the nearest representable point of iv: the
/// successor of lo when x_i <= lo, hi itself when x_i > hi. If the subtraction rounds,
/// delta_i is pushed outward by a few ulps so that x_i + delta_i still lands in iv.
double dist_feature(double x_i, interval iv);

perturbation_norm norm(std::span<const double> deltas, norm_index p);

/// O(1) norm update after the f-th component changes from old_component to new_component.
perturbation_norm update_norm(norm_index p, perturbation_norm delta_norm, double old_component,
                              double new_component);

/// Norm of a sum of pairwise support-disjoint vectors from their individual norms.
perturbation_norm oplus(std::span<const double> norms, norm_index p);

/// Norm value kept in its additive domain: the nonzero count for p = 0, the running max for
/// p = inf, and sum |component|^p otherwise. The p-th root is taken only by value().
class norm_accumulator {
public:
    explicit norm_accumulator(norm_index p) : m_p(p) {}
    norm_accumulator(norm_index p, double raw) : m_p(p), m_raw(raw) {}

    void add(double component);
    /// Incremental one-component update; for p = inf it assumes |new_component| >= |old_component|.
    void replace(double old_component, double new_component);
    void combine(norm_accumulator const& other);

    perturbation_norm value() const;
    double raw() const { return m_raw; }
    norm_index p() const { return m_p; }

private:
    norm_index m_p;
    double m_raw = 0.0;
};

/// ||v - v'||_p for scalar thresholds: 0/1 for p = 0, |v - v'| otherwise.
double threshold_distance(norm_index p, double v, double w);

/// Minimum distance between thresholds on the same feature across distinct trees; +inf when
/// no feature is shared or fewer than two trees are given.
perturbation_norm spread(std::span<const decision_tree> trees, norm_index p);
inline perturbation_norm spread(ensemble const& T, norm_index p) { return spread(T.trees(), p); }

/// spread > 2k. Fewer than two trees are vacuously large-spread. With k = 0 the check is
/// "no two trees share a threshold value on a feature" for every p; p = 0 with k > 0 is
/// rejected with input_error.
bool is_large_spread(std::span<const decision_tree> trees, norm_index p, double k);
inline bool is_large_spread(ensemble const& T, norm_index p, double k) {
    return is_large_spread(T.trees(), p, k);
}

}  // namespace sv
