// Command-line front end: train, verify, spread, oracle-check, gadget, bench.

#include "spreadverify/bench.hpp"
#include "spreadverify/gadget.hpp"
#include "spreadverify/io.hpp"
#include "spreadverify/oracle.hpp"
#include "spreadverify/report.hpp"
#include "spreadverify/synth.hpp"
#include "spreadverify/trainer.hpp"
#include "spreadverify/verifier.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

namespace {

using json = nlohmann::ordered_json;

enum exit_code : int {
    ok = 0,
    usage = 1,
    training_failure = 2,
    not_large_spread = 3,
    oracle_capacity = 4,
    disagreement = 5,
};

std::uint64_t default_seed() {
    if (char const* env = std::getenv("SPREADVERIFY_SEED")) {
        try {
            return std::stoull(env);
        } catch (std::exception const&) {
            std::cerr << "warning: ignoring non-numeric SPREADVERIFY_SEED\n";
        }
    }
    return 0;
}

json number_or_inf(double v) { return std::isinf(v) ? json("inf") : json(v); }

struct norm_option {
    std::string text = "inf";
    sv::norm_index get() const { return sv::norm_index::parse(text); }
};

// train

struct train_args {
    std::string data, out;
    sv::train_config cfg;
    norm_option p;
    bool plain = false;
    bool as_json = false;
};

int run_train(train_args const& a) {
    auto const D = sv::io::load_csv(a.data);
    auto cfg = a.cfg;
    cfg.p = a.p.get();

    auto const t0 = std::chrono::steady_clock::now();
    std::optional<sv::ensemble> T;
    if (a.plain) {
        T = sv::train_random_forest(D, cfg.trees, cfg.max_depth, cfg.seed);
    } else {
        T = cfg.partitions > 1 ? sv::train_hierarchical(D, cfg) : sv::train_large_spread(D, cfg);
    }
    double const ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (!T) {
        if (a.as_json) {
            std::cout << json{{"status", "FAILURE"}, {"trees", cfg.trees}, {"k", cfg.k}}.dump() << '\n';
        } else {
            std::cout << "FAILURE: could not select " << cfg.trees << " large-spread trees for p = "
                      << cfg.p.to_string() << ", k = " << cfg.k << " within " << cfg.max_iter << " sweeps\n";
        }
        return training_failure;
    }
    if (!a.out.empty()) sv::io::save_model(*T, a.out);

    double const psi = sv::spread(*T, cfg.p);
    double const acc = sv::accuracy(*T, D);
    if (a.as_json) {
        json j{{"status", "ok"},        {"trees", T->size()},  {"nodes", T->total_nodes()},
               {"p", cfg.p.to_string()}, {"k", cfg.k},          {"spread", number_or_inf(psi)},
               {"large_spread", psi > 2 * cfg.k}, {"train_accuracy", acc}, {"train_ms", ms}};
        if (!a.out.empty()) j["model"] = a.out;
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "trained " << T->size() << " trees (" << T->total_nodes() << " nodes) in " << ms << " ms\n"
                  << "spread:         " << psi << " (2k = " << 2 * cfg.k << ")\n"
                  << "train accuracy: " << acc << '\n';
        if (!a.out.empty()) std::cout << "model written to " << a.out << '\n';
    }
    return ok;
}

// verify

struct verify_args {
    std::string model, data;
    norm_option p;
    double k = 0.0;
    unsigned jobs = 1;
    bool with_oracle = false;
    std::uint64_t max_leaf_tuples = 1'000'000;
    bool as_json = false;
};

int run_verify(verify_args const& a) {
    auto const T = sv::io::load_model(a.model);
    auto const D = sv::io::load_csv(a.data);
    if (D.dimension() != T.dimension()) {
        throw sv::input_error("data has " + std::to_string(D.dimension()) + " features, model expects " +
                              std::to_string(T.dimension()));
    }
    auto const p = a.p.get();
    auto report = sv::verify_dataset(T, p, a.k, D, a.jobs);

    std::optional<std::size_t> oracle_agree;
    if (a.with_oracle) {
        sv::oracle::config cfg;
        cfg.max_leaf_tuples = a.max_leaf_tuples;
        auto const t0 = std::chrono::steady_clock::now();
        std::size_t agree = 0;
        for (std::size_t i = 0; i != D.size(); ++i) {
            agree += sv::oracle::exact_robust(T, p, a.k, D.row(i), D.label_of(i), cfg).robust == report.rows[i].robust;
        }
        auto const t1 = std::chrono::steady_clock::now();
        report.timings_ms.emplace_back("oracle", std::chrono::duration<double, std::milli>(t1 - t0).count());
        oracle_agree = agree;
    }

    if (a.as_json) {
        auto j = json::parse(report.to_json());
        if (oracle_agree) j["oracle_agreement"] = *oracle_agree;
        std::cout << j.dump() << '\n';
    } else {
        std::cout << report.to_text();
        if (oracle_agree) std::cout << "oracle agreement: " << *oracle_agree << '/' << D.size() << '\n';
    }
    return oracle_agree && *oracle_agree != D.size() ? disagreement : ok;
}

// spread

int run_spread(std::string const& model, norm_option const& p_opt, std::optional<double> k, bool as_json) {
    auto const T = sv::io::load_model(model);
    auto const p = p_opt.get();
    double const psi = sv::spread(T, p);
    std::optional<bool> large;
    if (k) large = sv::is_large_spread(T, p, *k);
    if (as_json) {
        json j{{"trees", T.size()}, {"nodes", T.total_nodes()}, {"p", p.to_string()}, {"spread", number_or_inf(psi)}};
        if (k) {
            j["k"] = *k;
            j["large_spread"] = *large;
        }
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "spread: " << psi << '\n';
        if (k) std::cout << "large-spread for k = " << *k << ": " << (*large ? "yes" : "no") << '\n';
    }
    return ok;
}

// oracle-check

struct oracle_check_args {
    std::uint64_t seed = 0;
    std::size_t cases = 1000;
    std::size_t max_trees = 7;
    std::size_t max_depth = 3;
    std::size_t max_d = 5;
    std::uint64_t max_leaf_tuples = 100'000'000;
    bool as_json = false;
};

int run_oracle_check(oracle_check_args const& a) {
    if (a.max_trees == 0 || a.max_depth == 0 || a.max_d == 0) throw sv::input_error("sizes must be positive");
    std::mt19937_64 rng(a.seed);
    std::vector<std::size_t> sizes;
    for (std::size_t m = a.max_trees >= 3 ? 3 : 1; m <= a.max_trees; m += 2) sizes.push_back(m);
    std::uniform_int_distribution<std::size_t> pick_m(0, sizes.size() - 1), pick_depth(1, a.max_depth),
        pick_d(1, a.max_d);
    std::bernoulli_distribution coin(0.5);
    std::vector<sv::norm_index> const norms{sv::norm_index(1), sv::norm_index(2), sv::norm_index::infinity()};
    sv::oracle::config cfg;
    cfg.max_leaf_tuples = a.max_leaf_tuples;

    std::size_t agree = 0, robust = 0;
    json mismatches = json::array();
    auto const t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i != a.cases; ++i) {
        auto const c = sv::synth::random_large_spread_case(rng, sizes[pick_m(rng)], pick_d(rng), pick_depth(rng));
        auto const p = norms[i % norms.size()];
        auto const x = sv::synth::random_instance(rng, c.trees, c.k);
        auto const y = coin(rng) ? sv::label::positive : sv::label::negative;
        bool const fast = sv::robust_ensemble(c.trees, p, c.k, x, y).robust;
        bool const slow = sv::oracle::exact_robust(c.trees, p, c.k, x, y, cfg).robust;
        robust += fast;
        if (fast == slow) {
            ++agree;
        } else {
            mismatches.push_back({{"case", i}, {"p", p.to_string()}, {"k", c.k}, {"model", json::parse(sv::io::serialize_model(c.trees))}, {"x", x}, {"y", sv::to_int(y)}});
        }
    }
    double const ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (a.as_json) {
        std::cout << json{{"cases", a.cases}, {"agreement", agree}, {"robust", robust}, {"ms", ms},
                          {"mismatches", mismatches}}
                         .dump()
                  << '\n';
    } else {
        std::cout << "agreement " << agree << '/' << a.cases << " (" << robust << " robust, " << ms << " ms)\n";
        for (auto const& m : mismatches) std::cout << "mismatch: " << m.dump() << '\n';
    }
    return agree == a.cases ? ok : disagreement;
}

// gadget

int run_gadget(std::string const& path, std::size_t s, norm_option const& p_opt, bool as_json) {
    std::ifstream in(path);
    if (!in) throw sv::input_error("cannot open " + path);
    auto const g = sv::gadget::parse_edge_list(in);
    auto const r = sv::gadget::graph_to_ensemble(g);
    auto const p = p_opt.get();
    bool const subset = sv::oracle::exists_large_spread_subset(r.trees, s, p, 0.0);
    bool const clique = sv::gadget::clique_exists(g, s);
    if (as_json) {
        std::cout << json{{"vertices", g.vertices()}, {"edges", g.edges()}, {"features", r.dimension},
                          {"s", s}, {"large_spread_subset", subset}, {"clique", clique}, {"agree", subset == clique}}
                         .dump()
                  << '\n';
    } else {
        std::cout << "graph: " << g.vertices() << " vertices, " << g.edges() << " edges\n"
                  << "gadget: " << r.trees.size() << " trees over " << r.dimension << " features\n"
                  << "large-spread subset of size " << s << " (k = 0): " << (subset ? "yes" : "no") << '\n'
                  << "clique of size " << s << ": " << (clique ? "yes" : "no") << '\n';
    }
    return subset == clique ? ok : disagreement;
}

// bench

struct bench_args {
    std::string family = "scaling";
    sv::bench_config cfg;
    std::size_t fixed_trees = 25;
    std::size_t max_depth = 6;
    std::size_t max_trees = 101;
    norm_option p;
    bool as_json = false;
};

int run_bench_command(bench_args a) {
    auto& cfg = a.cfg;
    cfg.p = a.p.get();
    if (a.family == "scaling") {
        cfg.trees.clear();
        for (std::size_t m : {5u, 11u, 21u, 41u, 71u, 101u, 151u, 201u}) {
            if (m <= a.max_trees) cfg.trees.push_back(m);
        }
        if (cfg.trees.empty() || cfg.trees.back() != a.max_trees) cfg.trees.push_back(a.max_trees);
        cfg.depths = {a.max_depth};
    } else {
        cfg.trees = {a.fixed_trees};
        cfg.depths.clear();
        for (std::size_t depth = 1; depth <= a.max_depth; ++depth) cfg.depths.push_back(depth);
    }
    auto const rows = sv::run_bench(cfg);
    std::optional<double> slope;
    if (rows.size() >= 2) slope = sv::loglog_slope(rows);

    if (a.as_json) {
        json j{{"family", a.family}, {"d", cfg.d}, {"k", cfg.k}, {"p", cfg.p.to_string()}, {"instances", cfg.instances}};
        j["rows"] = json::array();
        for (auto const& r : rows) {
            j["rows"].push_back({{"trees", r.trees}, {"depth", r.depth}, {"nodes", r.nodes},
                                 {"us_per_instance", r.us_per_instance}, {"robustness", r.robustness}});
        }
        if (slope) j["loglog_slope"] = *slope;
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "trees  depth  nodes    us/instance  robustness\n";
        for (auto const& r : rows) {
            char line[96];
            std::snprintf(line, sizeof line, "%5zu  %5zu  %6zu  %11.3f  %10.3f\n", r.trees, r.depth, r.nodes,
                          r.us_per_instance, r.robustness);
            std::cout << line;
        }
        if (slope) std::cout << "log-log slope: " << *slope << '\n';
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Train large-spread tree ensembles and verify their robustness to L_p evasion attacks."};
    app.require_subcommand(1);
    std::uint64_t const env_seed = default_seed();

    train_args ta;
    ta.cfg.seed = env_seed;
    auto* train = app.add_subcommand("train", "Train a large-spread ensemble (or a plain random forest)");
    train->add_option("--data", ta.data, "Training CSV (last column is the label)")->required()->check(CLI::ExistingFile);
    train->add_option("--trees", ta.cfg.trees, "Number of trees m (odd)")->capture_default_str();
    train->add_option("--depth", ta.cfg.max_depth, "Maximum tree depth")->capture_default_str();
    train->add_option("--p", ta.p.text, "Norm: 1, 2, ... or inf")->capture_default_str();
    train->add_option("--k", ta.cfg.k, "Attacker budget")->capture_default_str();
    train->add_option("--max-iter", ta.cfg.max_iter, "FixForest sweeps per candidate")->capture_default_str();
    train->add_option("--partitions", ta.cfg.partitions, "Feature partitions for hierarchical training")
        ->capture_default_str();
    train->add_option("--seed", ta.cfg.seed, "Seed (default: $SPREADVERIFY_SEED or 0)")->capture_default_str();
    train->add_option("--out", ta.out, "Where to write the model JSON");
    train->add_flag("--plain", ta.plain, "Train a plain random forest without the spread constraint");
    train->add_flag("--json", ta.as_json, "Machine-readable output");

    verify_args va;
    auto* verify = app.add_subcommand("verify", "Verify robustness of a large-spread model on a dataset");
    verify->add_option("--model", va.model, "Model JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("--data", va.data, "Test CSV")->required()->check(CLI::ExistingFile);
    verify->add_option("--p", va.p.text, "Norm: 1, 2, ... or inf")->capture_default_str();
    verify->add_option("--k", va.k, "Attacker budget")->required();
    verify->add_option("--jobs", va.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    verify->add_flag("--oracle", va.with_oracle, "Cross-check every verdict with the exhaustive oracle");
    verify->add_option("--max-leaf-tuples", va.max_leaf_tuples, "Oracle capacity bound")->capture_default_str();
    verify->add_flag("--json", va.as_json, "Machine-readable output");

    std::string spread_model;
    norm_option spread_p;
    std::optional<double> spread_k;
    bool spread_json = false;
    auto* spread = app.add_subcommand("spread", "Print the p-spread of a model");
    spread->add_option("--model", spread_model, "Model JSON")->required()->check(CLI::ExistingFile);
    spread->add_option("--p", spread_p.text, "Norm: 0, 1, 2, ... or inf")->capture_default_str();
    spread->add_option("--k", spread_k, "Also report whether spread > 2k");
    spread->add_flag("--json", spread_json, "Machine-readable output");

    oracle_check_args oa;
    oa.seed = env_seed;
    auto* oracle_check = app.add_subcommand("oracle-check", "Compare the fast verifier with the exhaustive oracle");
    oracle_check->add_option("--seed", oa.seed, "Seed (default: $SPREADVERIFY_SEED or 0)")->capture_default_str();
    oracle_check->add_option("--cases", oa.cases, "Random (ensemble, instance) pairs")->capture_default_str();
    oracle_check->add_option("--max-trees", oa.max_trees, "Largest ensemble size")->capture_default_str();
    oracle_check->add_option("--max-depth", oa.max_depth, "Largest tree depth")->capture_default_str();
    oracle_check->add_option("--max-d", oa.max_d, "Largest dimensionality")->capture_default_str();
    oracle_check->add_option("--max-leaf-tuples", oa.max_leaf_tuples, "Oracle capacity bound")->capture_default_str();
    oracle_check->add_flag("--json", oa.as_json, "Machine-readable output");

    std::string graph_path;
    std::size_t clique_size = 0;
    norm_option gadget_p;
    bool gadget_json = false;
    auto* gadget = app.add_subcommand("gadget", "Check the max-clique reduction on a graph");
    gadget->add_option("--graph", graph_path, "Edge list: \"V E\" then E lines \"u v\"")->required()
        ->check(CLI::ExistingFile);
    gadget->add_option("--s", clique_size, "Subset / clique size")->required();
    gadget->add_option("--p", gadget_p.text, "Norm used for the zero-budget spread check")->capture_default_str();
    gadget->add_flag("--json", gadget_json, "Machine-readable output");

    bench_args ba;
    ba.cfg.seed = env_seed;
    auto* bench = app.add_subcommand("bench", "Time verification on synthetic large-spread ensembles");
    bench->add_option("--family", ba.family, "scaling (vary trees) or fixed (vary depth)")
        ->check(CLI::IsMember({"scaling", "fixed"}))
        ->capture_default_str();
    bench->add_option("--max-trees", ba.max_trees, "Largest ensemble in the scaling family")->capture_default_str();
    bench->add_option("--trees", ba.fixed_trees, "Ensemble size in the fixed family")->capture_default_str();
    bench->add_option("--depth", ba.max_depth, "Tree depth (largest depth for the fixed family)")->capture_default_str();
    bench->add_option("--d", ba.cfg.d, "Number of features")->capture_default_str();
    bench->add_option("--k", ba.cfg.k, "Attacker budget")->capture_default_str();
    bench->add_option("--p", ba.p.text, "Norm: 1, 2, ... or inf")->capture_default_str();
    bench->add_option("--instances", ba.cfg.instances, "Instances per row")->capture_default_str();
    bench->add_option("--repeats", ba.cfg.repeats, "Best-of repetitions")->capture_default_str();
    bench->add_option("--seed", ba.cfg.seed, "Seed (default: $SPREADVERIFY_SEED or 0)")->capture_default_str();
    bench->add_flag("--json", ba.as_json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*train) return run_train(ta);
        if (*verify) return run_verify(va);
        if (*spread) return run_spread(spread_model, spread_p, spread_k, spread_json);
        if (*oracle_check) return run_oracle_check(oa);
        if (*gadget) return run_gadget(graph_path, clique_size, gadget_p, gadget_json);
        if (*bench) return run_bench_command(ba);
    } catch (sv::not_large_spread_error const& e) {
        std::cerr << "error: model is not large-spread: spread " << e.spread() << " <= 2k = " << e.twice_k() << '\n';
        return not_large_spread;
    } catch (sv::capacity_error const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return oracle_capacity;
    } catch (sv::input_error const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (sv::structural_error const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }
    return usage;
}
