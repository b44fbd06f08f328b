#include "spreadverify/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sv::synth {

namespace {

decision_tree grow_random(std::mt19937_64& rng, std::size_t d, std::size_t depth_left, double lo, double hi,
                          bool force_split) {
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution split(0.75);
    if (depth_left == 0 || d == 0 || (!force_split && !split(rng))) {
        return decision_tree::leaf(coin(rng) ? label::positive : label::negative);
    }
    std::uniform_int_distribution<std::size_t> feature(0, d - 1);
    std::uniform_real_distribution<double> threshold(lo, hi);
    auto const f = feature(rng);
    auto const v = threshold(rng);
    auto left = grow_random(rng, d, depth_left - 1, lo, hi, false);
    auto right = grow_random(rng, d, depth_left - 1, lo, hi, false);
    return decision_tree::split(f, v, left, right);
}

decision_tree grow_full(std::mt19937_64& rng, std::size_t depth_left,
                        std::vector<std::vector<double>>& pools) {
    std::bernoulli_distribution coin(0.5);
    if (depth_left == 0) return decision_tree::leaf(coin(rng) ? label::positive : label::negative);
    std::uniform_int_distribution<std::size_t> feature(0, pools.size() - 1);
    auto const f = feature(rng);
    if (pools[f].empty()) throw capacity_error("grid_spread_ensemble: threshold grid exhausted");
    double const v = pools[f].back();
    pools[f].pop_back();
    auto left = grow_full(rng, depth_left - 1, pools);
    auto right = grow_full(rng, depth_left - 1, pools);
    return decision_tree::split(f, v, left, right);
}

}  // namespace

decision_tree random_tree(std::mt19937_64& rng, std::size_t d, std::size_t max_depth, double lo, double hi) {
    return grow_random(rng, d, max_depth, lo, hi, true);
}

spread_case random_large_spread_case(std::mt19937_64& rng, std::size_t m, std::size_t d, std::size_t max_depth) {
    if (m % 2 == 0) throw contract_error("random_large_spread_case: m must be odd");
    std::uniform_real_distribution<double> fraction(0.2, 0.999);
    while (true) {
        std::vector<decision_tree> trees;
        for (std::size_t i = 0; i != m; ++i) trees.push_back(random_tree(rng, d, max_depth));
        double const psi = spread(trees, norm_index(1));
        if (!(psi > 0.0)) continue;
        double const k = std::isinf(psi) ? fraction(rng) * 5.0 : fraction(rng) * psi / 2.0;
        return {ensemble(std::move(trees), d), k};
    }
}

instance placed_instance(std::mt19937_64& rng, ensemble const& T, double k, placement where, double lo, double hi) {
    std::size_t const d = T.dimension();
    std::uniform_real_distribution<double> uniform(lo, hi);
    instance x(d);
    for (auto& v : x) v = uniform(rng);
    if (where == placement::uniform) return x;

    std::vector<std::vector<double>> by_feature(d);
    for (auto const& t : T.trees()) {
        for (auto const& n : t.nodes()) {
            if (!n.is_leaf()) by_feature[n.feature].push_back(n.threshold);
        }
    }
    std::uniform_real_distribution<double> near(-2.0 * k, 2.0 * k);
    std::uniform_int_distribution<int> side(-1, 1);
    for (std::size_t f = 0; f != d; ++f) {
        auto const& thresholds = by_feature[f];
        if (thresholds.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0, thresholds.size() - 1);
        double const v = thresholds[pick(rng)];
        if (where == placement::near_threshold) {
            x[f] = v + near(rng);
        } else {
            int const s = side(rng);
            x[f] = s < 0 ? std::nextafter(v, -constants::inf) : s > 0 ? std::nextafter(v, constants::inf) : v;
        }
    }
    return x;
}

instance random_instance(std::mt19937_64& rng, ensemble const& T, double k, double lo, double hi) {
    std::uniform_int_distribution<int> mode(0, 2);
    return placed_instance(rng, T, k, static_cast<placement>(mode(rng)), lo, hi);
}

ensemble grid_spread_ensemble(std::mt19937_64& rng, std::size_t m, std::size_t depth, std::size_t d, double k) {
    if (!(k > 0.0) || d == 0) throw contract_error("grid_spread_ensemble: need k > 0 and d > 0");
    double const gap = 3.0 * k;
    auto const slots = static_cast<std::size_t>(std::floor(1.0 / gap));
    std::vector<std::vector<double>> pools(d);
    for (auto& pool : pools) {
        pool.resize(slots);
        for (std::size_t s = 0; s != slots; ++s) pool[s] = (static_cast<double>(s) + 0.5) * gap;
        std::shuffle(pool.begin(), pool.end(), rng);
    }
    std::vector<decision_tree> trees;
    trees.reserve(m);
    for (std::size_t i = 0; i != m; ++i) trees.push_back(grow_full(rng, depth, pools));
    return ensemble(std::move(trees), d);
}

dataset separable_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t const q = std::min<std::size_t>(3, d);
    dataset D(d);
    instance x(d);
    for (std::size_t i = 0; i != n; ++i) {
        for (auto& v : x) v = u(rng);
        double const s = std::accumulate(x.begin(), x.begin() + static_cast<long>(q), 0.0);
        D.add(x, s > 0.5 * static_cast<double>(q) ? label::positive : label::negative);
    }
    return D;
}

}  // namespace sv::synth
