#pragma once

// Timing harness for verification on synthetic large-spread ensembles.

#include "core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sv {

struct bench_config {
    /// One row per (trees, depth) pair; the shorter list is padded with its last value.
    std::vector<std::size_t> trees{5, 11, 21, 41, 101};
    std::vector<std::size_t> depths{6};
    std::size_t d = 20;
    double k = 0.0005;
    norm_index p = norm_index::infinity();
    std::size_t instances = 1000;
    std::size_t repeats = 3;  // best of
    std::uint64_t seed = 0;
};

struct bench_row {
    std::size_t trees = 0;
    std::size_t depth = 0;
    std::size_t nodes = 0;
    double us_per_instance = 0.0;
    double robustness = 0.0;  // fraction of the uniform instances verified robust for +1
};

std::vector<bench_row> run_bench(bench_config const& cfg);

/// Least-squares slope of log(us_per_instance) against log(nodes).
double loglog_slope(std::span<const bench_row> rows);

}  // namespace sv
