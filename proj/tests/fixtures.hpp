#pragma once

#include "spreadverify/core.hpp"

#include <vector>

namespace sv::testing {

/// x_f <= v goes to `left_label`, otherwise the opposite label.
inline decision_tree stump(std::size_t f, double v, label left_label) {
    return decision_tree::split(f, v, decision_tree::leaf(left_label), decision_tree::leaf(flip(left_label)));
}

/// Depth-2 example tree: x0 <= 10 ? (x1 <= 5 ? +1 : -1) : (x1 <= 8 ? +1 : -1).
inline decision_tree example_depth2_tree() {
    return decision_tree::split(0, 10.0, stump(1, 5.0, label::positive), stump(1, 8.0, label::positive));
}

/// Three one-feature stumps: t1 = (x0 <= 10 ? -1 : +1), t2 = (x0 <= 12 ? +1 : -1),
/// t3 = (x0 <= 17 ? +1 : -1).
inline decision_tree t1() { return stump(0, 10.0, label::negative); }
inline decision_tree t2() { return stump(0, 12.0, label::positive); }
inline decision_tree t3() { return stump(0, 17.0, label::positive); }
inline ensemble three_stumps() { return ensemble({t1(), t2(), t3()}, 1); }

/// Stumps on feature 0 at 10/20/30, +1 on the left.
inline ensemble stairs() {
    return ensemble({stump(0, 10.0, label::positive), stump(0, 20.0, label::positive),
                     stump(0, 30.0, label::positive)},
                    1);
}

/// Stumps on features 0 and 1 at 10, plus feature 0 at 50; +1 on the left.
inline ensemble two_feature_stumps() {
    return ensemble({stump(0, 10.0, label::positive), stump(1, 10.0, label::positive),
                     stump(0, 50.0, label::positive)},
                    2);
}

inline ensemble constant(label y, std::size_t m = 3, std::size_t d = 1) {
    return ensemble(std::vector<decision_tree>(m, decision_tree::leaf(y)), d);
}

/// Smallest double e with 9 + e > 10, i.e. 1 + epsilon at that magnitude.
inline double one_plus_eps() { return dist_feature(9.0, interval{10.0, constants::inf}); }

}  // namespace sv::testing
