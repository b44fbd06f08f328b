#pragma once

#include "core.hpp"
#include "dataset.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sv {

/// Per-class shuffled split. The train part gets round(fraction * n) rows, spread over the
/// classes so that each class is off from its exact share by less than one row.
std::pair<dataset, dataset> stratified_split(dataset const& D, double train_fraction, std::uint64_t seed);

double accuracy(ensemble const& T, dataset const& D);

struct instance_verdict {
    std::size_t index = 0;
    label truth = label::positive;
    label predicted = label::positive;
    bool robust = false;
    bool stable = false;
    std::optional<double> attack_norm;
};

struct run_report {
    norm_index p;
    double k = 0.0;
    double spread = 0.0;
    std::vector<instance_verdict> rows;
    double accuracy = 0.0;
    double robustness = 0.0;
    std::vector<std::pair<std::string, double>> timings_ms;

    /// Recompute accuracy and robustness from rows.
    void aggregate();
    std::string to_json() const;
    std::string to_text() const;
};

/// Verify every instance of D on a large-spread ensemble, fanning out over `jobs` threads.
/// Throws not_large_spread_error before doing any work when the precondition fails.
run_report verify_dataset(ensemble const& T, norm_index p, double k, dataset const& D, unsigned jobs = 1);

}  // namespace sv
