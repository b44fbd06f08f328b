#include "spreadverify/report.hpp"

#include "spreadverify/verifier.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace sv {

std::pair<dataset, dataset> stratified_split(dataset const& D, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw input_error("train fraction must be in (0, 1)");
    if (D.count(label::positive) == 0 || D.count(label::negative) == 0) {
        throw input_error("stratified split needs instances of both labels");
    }

    std::mt19937_64 rng(seed);
    std::array<std::vector<std::size_t>, 2> by_class;  // [negative, positive]
    for (std::size_t i = 0; i != D.size(); ++i) by_class[D.label_of(i) == label::positive].push_back(i);

    auto const target = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(D.size())));
    std::array<std::size_t, 2> take{};
    std::array<double, 2> remainder{};
    std::size_t assigned = 0;
    for (std::size_t c = 0; c != 2; ++c) {
        double const exact = train_fraction * static_cast<double>(by_class[c].size());
        take[c] = static_cast<std::size_t>(std::floor(exact));
        remainder[c] = exact - std::floor(exact);
        assigned += take[c];
    }
    // hand out the rows lost to flooring, largest remainder first (negative class on ties)
    while (assigned < target) {
        std::size_t const c = remainder[1] > remainder[0] ? 1 : 0;
        if (take[c] < by_class[c].size()) ++take[c];
        remainder[c] = -1.0;
        ++assigned;
    }

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t c = 0; c != 2; ++c) {
        auto rows = by_class[c];
        std::shuffle(rows.begin(), rows.end(), rng);
        train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<long>(take[c]));
        test_rows.insert(test_rows.end(), rows.begin() + static_cast<long>(take[c]), rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {D.subset(train_rows), D.subset(test_rows)};
}

double accuracy(ensemble const& T, dataset const& D) {
    if (D.empty()) throw input_error("accuracy of an empty dataset is undefined");
    std::size_t correct = 0;
    for (std::size_t i = 0; i != D.size(); ++i) {
        if (predict_ensemble(T, D.row(i)) == D.label_of(i)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(D.size());
}

void run_report::aggregate() {
    if (rows.empty()) {
        accuracy = robustness = 0.0;
        return;
    }
    std::size_t correct = 0, robust = 0;
    for (auto const& r : rows) {
        correct += r.predicted == r.truth;
        robust += r.robust;
    }
    accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
    robustness = static_cast<double>(robust) / static_cast<double>(rows.size());
}

std::string run_report::to_json() const {
    using json = nlohmann::ordered_json;
    json j;
    j["p"] = p.to_string();
    j["k"] = k;
    j["spread"] = std::isinf(spread) ? json("inf") : json(spread);
    j["instances"] = rows.size();
    j["accuracy"] = accuracy;
    j["robustness"] = robustness;
    json timings = json::object();
    for (auto const& [phase, ms] : timings_ms) timings[phase] = ms;
    j["timings_ms"] = timings;
    json verdicts = json::array();
    for (auto const& r : rows) {
        json v;
        v["index"] = r.index;
        v["label"] = to_int(r.truth);
        v["predicted"] = to_int(r.predicted);
        v["stable"] = r.stable;
        v["robust"] = r.robust;
        v["attack_norm"] = r.attack_norm ? json(*r.attack_norm) : json(nullptr);
        verdicts.push_back(v);
    }
    j["verdicts"] = verdicts;
    return j.dump();
}

std::string run_report::to_text() const {
    std::ostringstream out;
    out << "instances:  " << rows.size() << '\n'
        << "p:          " << p.to_string() << '\n'
        << "k:          " << k << '\n'
        << "spread:     " << spread << '\n'
        << "accuracy:   " << accuracy << '\n'
        << "robustness: " << robustness << '\n';
    for (auto const& [phase, ms] : timings_ms) out << "time " << phase << ": " << ms << " ms\n";
    return out.str();
}

run_report verify_dataset(ensemble const& T, norm_index p, double k, dataset const& D, unsigned jobs) {
    using clock = std::chrono::steady_clock;
    if (D.empty()) throw input_error("cannot verify an empty dataset");

    run_report report;
    report.p = p;
    report.k = k;

    auto const t0 = clock::now();
    report.spread = spread(T, p);
    require_large_spread(T, p, k);
    auto const t1 = clock::now();

    report.rows.resize(D.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i != end; ++i) {
            auto v = robust_ensemble_unchecked(T, p, k, D.row(i), D.label_of(i));
            report.rows[i] = {i, D.label_of(i), v.predicted, v.robust, v.stable, v.min_attack_norm};
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(D.size())));
    if (jobs == 1) {
        work(0, D.size());
    } else {
        std::vector<std::thread> workers;
        std::size_t const chunk = (D.size() + jobs - 1) / jobs;
        for (unsigned w = 0; w != jobs; ++w) {
            std::size_t const begin = std::min(D.size(), w * chunk);
            std::size_t const end = std::min(D.size(), begin + chunk);
            workers.emplace_back(work, begin, end);
        }
        for (auto& t : workers) t.join();
    }
    auto const t2 = clock::now();

    report.aggregate();
    auto ms = [](auto a, auto b) { return std::chrono::duration<double, std::milli>(b - a).count(); };
    report.timings_ms = {{"spread_check", ms(t0, t1)}, {"verify", ms(t1, t2)}};
    return report;
}

}  // namespace sv
