#include "fixtures.hpp"

#include "spreadverify/io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

using namespace sv;
using namespace sv::testing;
namespace fs = std::filesystem;

namespace {

struct result {
    int code = -1;
    std::string output;  // stdout and stderr
};

result run(std::string const& args, std::string const& env = "") {
    std::string const cmd = env + (env.empty() ? "" : " ") + SPREADVERIFY_CLI + std::string(" ") + args + " 2>&1";
    result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buffer[4096];
    while (std::size_t n = std::fread(buffer, 1, sizeof buffer, pipe)) r.output.append(buffer, n);
    int const status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("spreadverify_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(std::string const& name) const { return (dir / name).string(); }

    std::string write(std::string const& name, std::string const& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    fs::path dir;
};

std::string const data = std::string(SPREADVERIFY_TEST_DATA) + "/breast_cancer.csv";

}  // namespace

TEST_F(cli, usage_errors) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("verify --model nope.json --data nope.csv --k 1").code, 1);
    EXPECT_EQ(run("--help").code, 0);
    EXPECT_EQ(run("train --data " + data + " --trees 4").code, 1);
    EXPECT_EQ(run("train --data " + data + " --p 0").code, 1);
}

TEST_F(cli, verify_rejects_small_spread) {
    io::save_model(three_stumps(), path("m.json"));
    auto const csv = write("x.csv", "11,1\n");
    auto const r = run("verify --model " + path("m.json") + " --data " + csv + " --p 1 --k 2");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.output.find("spread 2"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("2k = 4"), std::string::npos) << r.output;
}

TEST_F(cli, train_then_verify) {
    auto const t = run("train --data " + data + " --trees 5 --depth 3 --k 0.01 --seed 3 --out " + path("m.json"));
    ASSERT_EQ(t.code, 0) << t.output;
    auto const v = run("verify --model " + path("m.json") + " --data " + data + " --k 0.01 --jobs 2 --json");
    ASSERT_EQ(v.code, 0) << v.output;
    auto const j = nlohmann::json::parse(v.output);
    EXPECT_GE(j["robustness"].get<double>(), 0.0);
    EXPECT_LE(j["robustness"].get<double>(), 1.0);
    EXPECT_EQ(j["instances"], 569);

    auto const text = run("verify --model " + path("m.json") + " --data " + data + " --k 0.01");
    EXPECT_NE(text.output.find("robustness: 0."), std::string::npos) << text.output;

    auto const s = run("spread --model " + path("m.json") + " --p inf --k 0.01 --json");
    ASSERT_EQ(s.code, 0);
    EXPECT_TRUE(nlohmann::json::parse(s.output)["large_spread"].get<bool>());
}

TEST_F(cli, seed_from_environment) {
    ASSERT_EQ(run("train --data " + data + " --trees 3 --depth 2 --seed 17 --out " + path("a.json")).code, 0);
    ASSERT_EQ(run("train --data " + data + " --trees 3 --depth 2 --out " + path("b.json"), "SPREADVERIFY_SEED=17").code, 0);
    std::ifstream a(path("a.json")), b(path("b.json"));
    std::string sa, sb;
    std::getline(a, sa);
    std::getline(b, sb);
    EXPECT_EQ(sa, sb);
}

TEST_F(cli, training_failure) {
    std::string csv;
    for (int i = 0; i != 40; ++i) csv += std::to_string(i / 40.0) + "," + ((i / 5) % 2 ? "1" : "-1") + "\n";
    auto const r = run("train --data " + write("one.csv", csv) +
                       " --trees 5 --depth 3 --k 1 --max-iter 1 --out " + path("m.json"));
    EXPECT_EQ(r.code, 2) << r.output;
    EXPECT_NE(r.output.find("FAILURE"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("m.json")));
}

TEST_F(cli, oracle_capacity) {
    ensemble const T({example_depth2_tree(), example_depth2_tree().remap_features(std::vector<std::size_t>{2, 3}),
                      decision_tree::leaf(label::positive)},
                     4);
    io::save_model(T, path("m.json"));
    auto const csv = write("x.csv", "1,2,3,4,1\n");
    auto const r = run("verify --model " + path("m.json") + " --data " + csv +
                       " --p 2 --k 0.5 --oracle --max-leaf-tuples 4");
    EXPECT_EQ(r.code, 4) << r.output;
    auto const fine = run("verify --model " + path("m.json") + " --data " + csv + " --p 2 --k 0.5 --oracle");
    EXPECT_EQ(fine.code, 0) << fine.output;
    EXPECT_NE(fine.output.find("oracle agreement: 1/1"), std::string::npos);
}

TEST_F(cli, oracle_check) {
    auto const r = run("oracle-check --seed 4 --cases 60 --max-trees 5 --max-depth 3 --max-d 4");
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("agreement 60/60"), std::string::npos) << r.output;
}

TEST_F(cli, gadget) {
    auto const g = write("path.txt", "3 2\n0 1\n1 2\n");
    auto const two = run("gadget --graph " + g + " --s 2 --json");
    ASSERT_EQ(two.code, 0) << two.output;
    auto const j = nlohmann::json::parse(two.output);
    EXPECT_TRUE(j["clique"].get<bool>());
    EXPECT_TRUE(j["large_spread_subset"].get<bool>());
    auto const three = run("gadget --graph " + g + " --s 3");
    EXPECT_EQ(three.code, 0);
    EXPECT_NE(three.output.find("clique of size 3: no"), std::string::npos) << three.output;
}

TEST_F(cli, bench) {
    auto const r = run("bench --family scaling --max-trees 21 --depth 3 --instances 50 --repeats 1 --json");
    ASSERT_EQ(r.code, 0) << r.output;
    auto const j = nlohmann::json::parse(r.output);
    EXPECT_EQ(j["rows"].size(), 3u);
    EXPECT_TRUE(j.contains("loglog_slope"));
    auto const f = run("bench --family fixed --trees 5 --depth 3 --instances 50 --repeats 1");
    EXPECT_EQ(f.code, 0) << f.output;
    EXPECT_NE(f.output.find("log-log slope"), std::string::npos);
}
