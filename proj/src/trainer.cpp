#include "spreadverify/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace sv {

void train_config::validate(std::size_t d) const {
    if (trees == 0 || trees % 2 == 0) throw input_error("number of trees must be odd");
    if (max_depth == 0) throw input_error("max depth must be positive");
    if (p.is_zero()) throw input_error("large-spread training does not support p = 0");
    if (!(k > 0.0) || !std::isfinite(k)) throw input_error("k must be a positive finite budget");
    if (max_iter == 0) throw input_error("max-iter must be positive");
    if (partitions == 0) throw input_error("partitions must be >= 1");
    if (partitions > d) throw input_error("partitions cannot exceed the number of features");
    if (partitions > trees) throw input_error("partitions cannot exceed the number of trees");
}

namespace {

struct split_choice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = constants::inf;
};

double gini_weighted(double pos, double total) {
    if (total == 0.0) return 0.0;
    double const q = pos / total;
    return total * 2.0 * q * (1.0 - q);
}

class cart_builder {
public:
    cart_builder(dataset const& D, std::size_t max_depth, std::mt19937_64& rng)
        : m_data(D), m_max_depth(max_depth), m_rng(rng) {
        m_features_per_split = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(D.dimension()))));
        m_features_per_split = std::max<std::size_t>(1, m_features_per_split);
    }

    decision_tree grow(std::vector<std::size_t> rows, std::size_t depth, label fallback) {
        std::size_t const pos = static_cast<std::size_t>(std::count_if(
            rows.begin(), rows.end(), [&](std::size_t r) { return m_data.label_of(r) == label::positive; }));
        std::size_t const neg = rows.size() - pos;
        label const majority = pos > neg ? label::positive : neg > pos ? label::negative : fallback;

        if (pos == 0 || neg == 0 || depth >= m_max_depth || rows.size() < 2) return decision_tree::leaf(majority);

        auto best = find_split(rows, static_cast<double>(pos));
        if (!best) return decision_tree::leaf(majority);

        std::vector<std::size_t> left, right;
        for (auto r : rows) {
            (m_data.row(r)[best->feature] <= best->threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        auto l = grow(std::move(left), depth + 1, majority);
        auto r = grow(std::move(right), depth + 1, majority);
        return decision_tree::split(best->feature, best->threshold, l, r);
    }

private:
    std::optional<split_choice> find_split(std::vector<std::size_t> const& rows, double total_pos) {
        std::vector<std::size_t> order(m_data.dimension());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), m_rng);

        std::optional<split_choice> best;
        std::vector<std::pair<double, label>> column(rows.size());
        std::size_t visited = 0;
        for (auto f : order) {
            // keep drawing features past the quota until some valid split exists
            if (visited >= m_features_per_split && best) break;
            ++visited;
            for (std::size_t i = 0; i != rows.size(); ++i) {
                column[i] = {m_data.row(rows[i])[f], m_data.label_of(rows[i])};
            }
            std::sort(column.begin(), column.end(),
                      [](auto const& a, auto const& b) { return a.first < b.first; });

            double const total = static_cast<double>(column.size());
            double left_pos = 0.0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                if (column[i].second == label::positive) left_pos += 1.0;
                double const a = column[i].first;
                double const b = column[i + 1].first;
                if (!(a < b)) continue;
                double const left_n = static_cast<double>(i + 1);
                double const impurity = gini_weighted(left_pos, left_n) +
                                        gini_weighted(total_pos - left_pos, total - left_n);
                if (!best || impurity < best->impurity) {
                    double mid = a + (b - a) / 2.0;
                    if (!(mid < b)) mid = a;
                    best = split_choice{f, mid, impurity};
                }
            }
        }
        return best;
    }

    dataset const& m_data;
    std::size_t m_max_depth;
    std::mt19937_64& m_rng;
    std::size_t m_features_per_split;
};

std::uint64_t partition_seed(std::uint64_t seed, std::size_t part) {
    return seed + static_cast<std::uint64_t>(part) * 0x9E3779B97F4A7C15ULL;
}

std::optional<std::vector<decision_tree>> select_large_spread(dataset const& D, std::size_t m,
                                                              train_config const& cfg,
                                                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto pool = train_trees(D, 2 * m, cfg.max_depth, rng());

    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::size_t const first = pick(rng);
    std::vector<decision_tree> selected{pool[first]};
    pool.erase(pool.begin() + static_cast<long>(first));

    auto const sampler = uniform_delta_sampler(cfg.k, rng);
    for (std::size_t i = 1; i < 2 * m && selected.size() < m;) {
        ++i;
        std::size_t const b = get_best_tree(pool, selected, cfg.p, cfg.k);
        auto candidate = selected;
        candidate.push_back(pool[b]);
        pool.erase(pool.begin() + static_cast<long>(b));
        if (auto fixed = fix_forest(std::move(candidate), cfg.p, cfg.k, cfg.max_iter, sampler)) {
            selected = std::move(*fixed);
        }
    }
    if (selected.size() != m) return std::nullopt;
    return selected;
}

}  // namespace

std::vector<decision_tree> train_trees(dataset const& D, std::size_t num_trees, std::size_t max_depth,
                                       std::uint64_t seed) {
    if (D.empty()) throw input_error("cannot train on an empty dataset");
    if (D.count(label::positive) == 0 || D.count(label::negative) == 0) {
        throw input_error("training data must contain both labels");
    }
    if (num_trees == 0) throw input_error("number of trees must be positive");

    std::mt19937_64 rng(seed);
    cart_builder builder(D, max_depth, rng);
    std::uniform_int_distribution<std::size_t> draw(0, D.size() - 1);

    std::vector<decision_tree> trees;
    trees.reserve(num_trees);
    for (std::size_t i = 0; i != num_trees; ++i) {
        std::vector<std::size_t> sample(D.size());
        for (auto& r : sample) r = draw(rng);
        trees.push_back(builder.grow(std::move(sample), 0, label::positive));
    }
    return trees;
}

ensemble train_random_forest(dataset const& D, std::size_t num_trees, std::size_t max_depth,
                             std::uint64_t seed) {
    if (num_trees % 2 == 0) throw input_error("number of trees must be odd");
    return ensemble(train_trees(D, num_trees, max_depth, seed), D.dimension());
}

std::size_t feature_overlaps(decision_tree const& candidate, std::span<const decision_tree> current,
                             norm_index p, double k) {
    std::map<std::uint32_t, std::vector<double>> thresholds;
    for (auto const& t : current) {
        for (auto const& n : t.nodes()) {
            if (!n.is_leaf()) thresholds[n.feature].push_back(n.threshold);
        }
    }
    for (auto& [f, values] : thresholds) std::sort(values.begin(), values.end());

    std::vector<std::uint32_t> overlapping;
    for (auto const& n : candidate.nodes()) {
        if (n.is_leaf()) continue;
        auto it = thresholds.find(n.feature);
        if (it == thresholds.end()) continue;
        auto const& values = it->second;
        // threshold_distance is monotone in |v - w|, so only the nearest neighbours matter
        auto pos = std::lower_bound(values.begin(), values.end(), n.threshold);
        bool close = false;
        if (pos != values.end()) close = close || threshold_distance(p, n.threshold, *pos) <= 2.0 * k;
        if (pos != values.begin()) close = close || threshold_distance(p, n.threshold, *std::prev(pos)) <= 2.0 * k;
        if (close) overlapping.push_back(n.feature);
    }
    std::sort(overlapping.begin(), overlapping.end());
    return static_cast<std::size_t>(std::unique(overlapping.begin(), overlapping.end()) - overlapping.begin());
}

std::size_t get_best_tree(std::span<const decision_tree> pool, std::span<const decision_tree> current,
                          norm_index p, double k) {
    if (pool.empty()) throw contract_error("get_best_tree: empty pool");
    std::size_t best = 0;
    std::size_t best_overlaps = feature_overlaps(pool[0], current, p, k);
    for (std::size_t i = 1; i < pool.size() && best_overlaps > 0; ++i) {
        std::size_t const overlaps = feature_overlaps(pool[i], current, p, k);
        if (overlaps < best_overlaps) {
            best = i;
            best_overlaps = overlaps;
        }
    }
    return best;
}

delta_sampler uniform_delta_sampler(double k, std::mt19937_64& rng) {
    return [k, &rng] {
        std::uniform_real_distribution<double> u(k, 2.0 * k);  // [k, 2k)
        return 3.0 * k - u(rng);
    };
}

std::optional<std::vector<decision_tree>> fix_forest(std::vector<decision_tree> trees, norm_index p,
                                                     double k, std::size_t max_iter,
                                                     delta_sampler const& next_delta) {
    if (p.is_zero()) throw input_error("fix_forest does not support p = 0");
    if (!(k > 0.0)) throw input_error("fix_forest requires k > 0");

    std::vector<std::vector<std::size_t>> internal(trees.size());
    for (std::size_t i = 0; i != trees.size(); ++i) {
        for (std::size_t j = 0; j != trees[i].size(); ++j) {
            if (!trees[i].node(j).is_leaf()) internal[i].push_back(j);
        }
    }

    for (std::size_t iter = 0; iter < max_iter && !is_large_spread(trees, p, k); ++iter) {
        for (std::size_t i = 0; i != trees.size(); ++i) {
            for (std::size_t a : internal[i]) {
                for (std::size_t j = i + 1; j < trees.size(); ++j) {
                    for (std::size_t b : internal[j]) {
                        auto const& na = trees[i].node(a);
                        auto const& nb = trees[j].node(b);
                        if (na.feature != nb.feature) continue;
                        double const v = na.threshold;
                        double const w = nb.threshold;
                        if (threshold_distance(p, v, w) > 2.0 * k) continue;
                        double const delta = next_delta();
                        if (v <= w) {
                            trees[i].set_threshold(a, v - delta);
                            trees[j].set_threshold(b, w + delta);
                        } else {
                            trees[i].set_threshold(a, v + delta);
                            trees[j].set_threshold(b, w - delta);
                        }
                    }
                }
            }
        }
    }
    if (!is_large_spread(trees, p, k)) return std::nullopt;
    return trees;
}

std::optional<std::vector<decision_tree>> fix_forest(std::vector<decision_tree> trees, norm_index p,
                                                     double k, std::size_t max_iter, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return fix_forest(std::move(trees), p, k, max_iter, uniform_delta_sampler(k, rng));
}

std::optional<ensemble> train_large_spread(dataset const& D, train_config const& cfg) {
    cfg.validate(D.dimension());
    auto trees = select_large_spread(D, cfg.trees, cfg, cfg.seed);
    if (!trees) return std::nullopt;
    return ensemble(std::move(*trees), D.dimension());
}

std::vector<std::vector<std::size_t>> partition_features(std::size_t d, std::size_t parts) {
    if (parts == 0 || parts > d) throw input_error("invalid number of feature partitions");
    std::vector<std::vector<std::size_t>> out(parts);
    for (std::size_t f = 0; f != d; ++f) out[f % parts].push_back(f);
    return out;
}

std::vector<std::size_t> partition_tree_counts(std::size_t trees, std::size_t parts) {
    if (parts == 0) throw input_error("invalid number of feature partitions");
    std::vector<std::size_t> out(parts, trees / parts);
    for (std::size_t j = 0; j != trees % parts; ++j) ++out[j];
    return out;
}

std::optional<ensemble> train_hierarchical(dataset const& D, train_config const& cfg) {
    cfg.validate(D.dimension());
    auto const parts = partition_features(D.dimension(), cfg.partitions);
    auto const counts = partition_tree_counts(cfg.trees, cfg.partitions);

    std::vector<decision_tree> merged;
    for (std::size_t j = 0; j != parts.size(); ++j) {
        auto sub = select_large_spread(D.project(parts[j]), counts[j], cfg, partition_seed(cfg.seed, j));
        if (!sub) return std::nullopt;
        for (auto const& t : *sub) merged.push_back(t.remap_features(parts[j]));
    }
    return ensemble(std::move(merged), D.dimension());
}

}  // namespace sv
