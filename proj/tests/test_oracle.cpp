#include "fixtures.hpp"

#include "spreadverify/oracle.hpp"
#include "spreadverify/synth.hpp"
#include "spreadverify/verifier.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace sv;
using namespace sv::testing;

namespace {

std::vector<norm_index> const ensemble_norms{norm_index(1), norm_index(2), norm_index::infinity()};

std::vector<std::size_t> support(std::vector<double> const& z, instance_view x) {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f != x.size(); ++f) {
        if (z[f] != x[f]) out.push_back(f);
    }
    return out;
}

bool disjoint(std::vector<std::size_t> const& a, std::vector<std::size_t> const& b) {
    return std::none_of(a.begin(), a.end(), [&](std::size_t f) { return std::count(b.begin(), b.end(), f); });
}

}  // namespace

TEST(exact_robust, three_stumps_robust_at_11) {
    auto const r = oracle::exact_robust(three_stumps(), norm_index(1), 2, instance{11}, label::positive);
    EXPECT_TRUE(r.robust);
    EXPECT_FALSE(r.witness.has_value());
}

TEST(exact_robust, only_t2_attackable_at_14) {
    ensemble const T({decision_tree::leaf(label::positive), t2(), t3()}, 1);
    instance const x{14};
    EXPECT_TRUE(oracle::exact_robust(T, norm_index(1), 2, x, label::positive).robust);
    // attackable: some z within budget makes the tree change its own prediction on x
    auto attackable = [&](decision_tree const& t) {
        ensemble const single({t}, 1);
        return !oracle::exact_robust(single, norm_index(1), 2, x, predict_tree(t, x)).robust;
    };
    EXPECT_TRUE(attackable(t2()));
    EXPECT_FALSE(attackable(t3()));
}

TEST(exact_robust, singleton_t1_witness) {
    ensemble const T({t1()}, 1);
    auto const r = oracle::exact_robust(T, norm_index(1), 2, instance{11}, label::positive);
    ASSERT_FALSE(r.robust);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_LE(r.witness->z[0], 10.0);
    EXPECT_EQ(r.witness->norm_value, 1.0);

    // grid search over z in [9, 13] at resolution 1e-3
    double best = constants::inf;
    for (int i = 0; i <= 4000; ++i) {
        double const z = 9.0 + i * 1e-3;
        if (predict_tree(t1(), instance{z}) == label::negative) best = std::min(best, std::abs(z - 11.0));
    }
    EXPECT_NEAR(best, r.witness->norm_value, 1e-3);
}

TEST(exact_robust, misprediction_is_a_zero_cost_attack) {
    auto const r = oracle::exact_robust(stairs(), norm_index::infinity(), 0, instance{11}, label::negative);
    EXPECT_FALSE(r.robust);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_EQ(r.witness->norm_value, 0.0);
}

TEST(exact_robust, capacity_bound_is_enforced) {
    std::mt19937_64 rng(1);
    std::vector<decision_tree> trees;
    for (int i = 0; i != 7; ++i) trees.push_back(synth::random_tree(rng, 3, 5));
    ensemble const T(trees, 3);
    oracle::config tiny;
    tiny.max_leaf_tuples = 10;
    EXPECT_THROW(oracle::exact_robust(T, norm_index(1), 1, instance{1, 1, 1}, label::positive, tiny), capacity_error);
    EXPECT_THROW(oracle::minimal_attack(T, norm_index(1), instance{1, 1, 1}, label::positive, tiny), capacity_error);
}

TEST(minimal_attack, examples) {
    auto const w1 = oracle::minimal_attack(ensemble({t1()}, 1), norm_index(1), instance{11}, label::positive);
    ASSERT_TRUE(w1.has_value());
    EXPECT_EQ(w1->norm_value, 1.0);

    EXPECT_FALSE(oracle::minimal_attack(constant(label::positive), norm_index(1), instance{0}, label::positive));

    auto const w2 = oracle::minimal_attack(two_feature_stumps(), norm_index(1), instance{9, 9}, label::positive);
    ASSERT_TRUE(w2.has_value());
    EXPECT_EQ(w2->norm_value, 2 * one_plus_eps());
    EXPECT_GT(w2->norm_value, 2.0);
}

TEST(minimal_attack, is_tight_against_exact_robust) {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep != 200; ++rep) {
        auto const c = synth::random_large_spread_case(rng, 3, 3, 3);
        auto const x = synth::random_instance(rng, c.trees, c.k);
        for (auto p : ensemble_norms) {
            auto const w = oracle::minimal_attack(c.trees, p, x, label::positive);
            if (!w) continue;
            EXPECT_NE(predict_ensemble(c.trees, w->z), label::positive);
            EXPECT_FALSE(oracle::exact_robust(c.trees, p, w->norm_value, x, label::positive).robust);
            if (w->norm_value > 0) {
                double const below = std::nextafter(w->norm_value, 0.0);
                EXPECT_TRUE(oracle::exact_robust(c.trees, p, below, x, label::positive).robust);
            }
        }
    }
}

TEST(minimal_attack, singleton_matches_reachable) {
    std::mt19937_64 rng(32);
    for (int rep = 0; rep != 300; ++rep) {
        auto const t = synth::random_tree(rng, 4, 4);
        ensemble const T({t}, 4);
        auto const x = synth::random_instance(rng, T, 1.0);
        for (auto p : {norm_index(0), norm_index(1), norm_index(2), norm_index::infinity()}) {
            auto const w = oracle::minimal_attack(T, p, x, label::positive);
            auto const r = reachable(t, p, constants::inf, x, label::positive);
            ASSERT_EQ(w.has_value(), !r.empty());
            if (w) { EXPECT_NEAR(w->norm_value, r.min(), 1e-12 * std::max(1.0, r.min())); }
        }
    }
}

TEST(minimal_attack, per_tree_witnesses_have_disjoint_support) {
    std::mt19937_64 rng(33);
    int checked = 0;
    for (int rep = 0; rep != 2000 && checked < 100; ++rep) {
        auto const c = synth::random_large_spread_case(rng, 3, 3, 3);
        auto const x = synth::random_instance(rng, c.trees, c.k);
        for (auto p : ensemble_norms) {
            ensemble const a({c.trees.tree(0)}, 3), b({c.trees.tree(1)}, 3);
            auto const wa = oracle::exact_robust(a, p, c.k, x, label::positive).witness;
            auto const wb = oracle::exact_robust(b, p, c.k, x, label::positive).witness;
            if (!wa || !wb) continue;
            ++checked;
            EXPECT_TRUE(disjoint(support(wa->z, x), support(wb->z, x)));
        }
    }
    EXPECT_GE(checked, 100);
}

TEST(minimal_joint_attack, composes_per_tree_minima) {
    std::mt19937_64 rng(34);
    int checked = 0;
    for (int rep = 0; rep != 500; ++rep) {
        auto const c = synth::random_large_spread_case(rng, 5, 3, 3);
        auto const x = synth::random_instance(rng, c.trees, c.k);
        for (auto p : ensemble_norms) {
            std::vector<decision_tree> attackable;
            std::vector<double> norms;
            for (auto const& t : c.trees.trees()) {
                auto const r = reachable(t, p, c.k, x, label::positive);
                if (r.empty()) continue;
                attackable.push_back(t);
                norms.push_back(r.min());
            }
            if (attackable.size() < 2) continue;
            ++checked;
            std::sort(norms.begin(), norms.end());
            auto const joint = oracle::minimal_joint_attack(attackable, p, x, label::positive);
            ASSERT_TRUE(joint.has_value());
            double const composed = oplus(norms, p);
            EXPECT_NEAR(joint->norm_value, composed, 1e-9 * std::max(1.0, composed));
        }
    }
    EXPECT_GT(checked, 50);
}

TEST(exact_robust, antitone_in_budget) {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> grow(1.0, 3.0);
    for (int rep = 0; rep != 200; ++rep) {
        auto const c = synth::random_large_spread_case(rng, 3, 3, 3);
        auto const x = synth::random_instance(rng, c.trees, c.k);
        for (auto p : ensemble_norms) {
            if (oracle::exact_robust(c.trees, p, c.k, x, label::positive).robust) continue;
            EXPECT_FALSE(oracle::exact_robust(c.trees, p, c.k * grow(rng), x, label::positive).robust);
        }
    }
}

TEST(naive_reachable, leaf_order_is_preorder) {
    auto const leaves = oracle::annotate_leaves(example_depth2_tree(), 2);
    ASSERT_EQ(leaves.size(), 4u);
    EXPECT_EQ(leaves[0].box[0], (interval{-constants::inf, 10}));
    EXPECT_EQ(leaves[0].box[1], (interval{-constants::inf, 5}));
    EXPECT_EQ(leaves[3].box[0], (interval{10, constants::inf}));
    EXPECT_EQ(leaves[3].box[1], (interval{8, constants::inf}));
    EXPECT_EQ(leaves[3].y, label::negative);
}

TEST(split_attack, disjoint_features) {
    auto const a = stump(0, 10, label::positive);
    auto const b = stump(1, 10, label::positive);
    instance const x{9, 9}, z{11, 12};
    auto const s = oracle::split_attack(a, b, x, z, label::positive);
    EXPECT_EQ(s.features, (std::vector<std::size_t>{0}));
    EXPECT_EQ(s.delta, (std::vector<double>{2, 0}));
    EXPECT_EQ(s.delta_prime, (std::vector<double>{0, 3}));
    EXPECT_EQ(s.first, (instance{11, 9}));
    EXPECT_EQ(s.second, (instance{9, 12}));
}

TEST(split_attack, no_perturbation) {
    instance const x{11, 11};
    auto const s = oracle::split_attack(stump(0, 10, label::positive), stump(1, 10, label::positive), x, x,
                                        label::positive);
    EXPECT_TRUE(s.features.empty());
    EXPECT_EQ(s.delta, (std::vector<double>{0, 0}));
    EXPECT_EQ(s.delta_prime, (std::vector<double>{0, 0}));
}

TEST(split_attack, precondition_checked) {
    EXPECT_THROW(oracle::split_attack(t1(), t2(), instance{11}, instance{11}, label::positive), contract_error);
    EXPECT_THROW(oracle::split_attack(t1(), t2(), instance{11}, instance{11, 3}, label::positive), contract_error);
}

TEST(split_attack, postconditions_on_random_pairs) {
    std::mt19937_64 rng(36);
    int checked = 0;
    for (int rep = 0; rep != 5000 && checked < 100; ++rep) {
        auto const c = synth::random_large_spread_case(rng, 3, 3, 3);
        auto const x = synth::random_instance(rng, c.trees, c.k);
        std::vector<decision_tree> const pair{c.trees.tree(0), c.trees.tree(1)};
        for (auto p : ensemble_norms) {
            auto const w = oracle::minimal_joint_attack(pair, p, x, label::positive);
            if (!w || w->norm_value > c.k) continue;
            ++checked;
            auto const s = oracle::split_attack(pair[0], pair[1], x, w->z, label::positive);
            for (std::size_t f = 0; f != x.size(); ++f) {
                EXPECT_TRUE(s.delta[f] == 0.0 || s.delta_prime[f] == 0.0);
                EXPECT_EQ(s.delta[f] + s.delta_prime[f], w->z[f] - x[f]);
            }
            EXPECT_NE(predict_tree(pair[0], s.first), label::positive);
            EXPECT_NE(predict_tree(pair[1], s.second), label::positive);
        }
    }
    EXPECT_GE(checked, 100);
}

TEST(exists_large_spread_subset, examples) {
    auto const T = three_stumps();
    for (auto p : ensemble_norms) EXPECT_TRUE(oracle::exists_large_spread_subset(T.trees(), 1, p, 2));
    EXPECT_TRUE(oracle::exists_large_spread_subset(T.trees(), 2, norm_index(1), 2));
    EXPECT_FALSE(oracle::exists_large_spread_subset(T.trees(), 3, norm_index(1), 2));
    EXPECT_FALSE(oracle::exists_large_spread_subset(T.trees(), 4, norm_index(1), 2));
}

TEST(exists_large_spread_subset, capacity_bound) {
    std::vector<decision_tree> many(21, t1());
    EXPECT_THROW(oracle::exists_large_spread_subset(many, 3, norm_index(1), 0), capacity_error);
}
