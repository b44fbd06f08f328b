#include "spreadverify/bench.hpp"

#include "spreadverify/synth.hpp"
#include "spreadverify/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace sv {

std::vector<bench_row> run_bench(bench_config const& cfg) {
    if (cfg.trees.empty() || cfg.depths.empty()) throw input_error("bench: need at least one size");
    if (cfg.instances == 0 || cfg.repeats == 0) throw input_error("bench: need at least one instance and repeat");
    std::size_t const rows = std::max(cfg.trees.size(), cfg.depths.size());
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::vector<bench_row> out;
    for (std::size_t r = 0; r != rows; ++r) {
        std::size_t const m = cfg.trees[std::min(r, cfg.trees.size() - 1)];
        std::size_t const depth = cfg.depths[std::min(r, cfg.depths.size() - 1)];
        auto const T = synth::grid_spread_ensemble(rng, m, depth, cfg.d, cfg.k);
        require_large_spread(T, cfg.p, cfg.k);

        std::vector<instance> xs(cfg.instances, instance(cfg.d));
        for (auto& x : xs) {
            for (auto& v : x) v = u(rng);
        }

        double best = std::numeric_limits<double>::infinity();
        std::size_t robust = 0;
        for (std::size_t rep = 0; rep != cfg.repeats; ++rep) {
            auto const t0 = std::chrono::steady_clock::now();
            for (auto const& x : xs) robust += robust_ensemble_unchecked(T, cfg.p, cfg.k, x, label::positive).robust;
            auto const t1 = std::chrono::steady_clock::now();
            best = std::min(best, std::chrono::duration<double, std::micro>(t1 - t0).count());
        }
        double const checked = static_cast<double>(cfg.instances * cfg.repeats);
        out.push_back({m, depth, T.total_nodes(), best / static_cast<double>(cfg.instances),
                       static_cast<double>(robust) / checked});
    }
    return out;
}

double loglog_slope(std::span<const bench_row> rows) {
    if (rows.size() < 2) throw input_error("slope needs at least two rows");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double const n = static_cast<double>(rows.size());
    for (auto const& r : rows) {
        double const x = std::log(static_cast<double>(r.nodes));
        double const y = std::log(r.us_per_instance);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double const den = n * sxx - sx * sx;
    if (den == 0.0) throw input_error("slope needs rows with different node counts");
    return (n * sxy - sx * sy) / den;
}

}  // namespace sv
