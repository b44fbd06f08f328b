#pragma once

#include <stdexcept>
#include <string>

namespace sv {

/// Malformed or inconsistent user input (bad dimensions, bad cells, empty datasets).
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A value violates a structural invariant of a domain type (even ensemble size,
/// ragged CSV, feature index out of range).
struct structural_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The caller broke a documented precondition.
struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};

/// An exhaustive search would exceed its configured bound.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The ensemble is not large-spread for the requested attacker, so the compositional
/// verdict would be unsound.
class not_large_spread_error : public std::runtime_error {
public:
    not_large_spread_error(double spread, double twice_k)
        : std::runtime_error("ensemble is not large-spread: spread " + std::to_string(spread) +
                             " <= 2k = " + std::to_string(twice_k))
        , m_spread(spread)
        , m_twice_k(twice_k) {}

    double spread() const { return m_spread; }
    double twice_k() const { return m_twice_k; }

private:
    double m_spread;
    double m_twice_k;
};

}  // namespace sv
