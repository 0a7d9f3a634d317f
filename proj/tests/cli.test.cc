// Copyright 2026 The cylsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cylsim/serialize.hpp"
#include "gtest/gtest.h"

using namespace cylsim;

namespace {

namespace fs = std::filesystem;

struct CliRun {
    int exit_code = -1;
    std::string out;
};

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("cylsim_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliRun run_cli(const std::string &args) {
    fs::path log = scratch_dir() / "stdout.txt";
    std::string cmd = std::string(CYLSIM_CLI_PATH) + " " + args + " > " + log.string() + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string read_file(const fs::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fixture(const std::string &name) {
    return std::string(CYLSIM_FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST(cli, lemma1_prints_lambda) {
    auto r = run_cli("lemma1");
    ASSERT_EQ(r.exit_code, 0);
    ASSERT_NE(r.out.find("lambda = 2.05817102727"), std::string::npos) << r.out;
}

TEST(cli, sample_is_deterministic_and_writes_provenance) {
    fs::path a = scratch_dir() / "a.csv";
    fs::path b = scratch_dir() / "b.csv";
    auto base = "sample --circuit " + fixture("grid2x3.json") + " --shots 2000 --seed 42";
    ASSERT_EQ(run_cli(base + " --threads 1 --out " + a.string()).exit_code, 0);
    ASSERT_EQ(run_cli(base + " --threads 4 --out " + b.string()).exit_code, 0);
    std::string csv = read_file(a);
    ASSERT_EQ(csv.rfind("bitstring,count\n", 0), 0u);
    ASSERT_EQ(csv, read_file(b));
    ASSERT_EQ(csv.find('\r'), std::string::npos);
    auto prov = Json::parse(read_file(a.string() + ".provenance.json"));
    ASSERT_EQ(prov["config"]["seed"], 42);
    ASSERT_TRUE(prov["simulability"]["simulable"].get<bool>());
    ASSERT_TRUE(prov.contains("stochastic_rep"));
    ASSERT_EQ(circuit_from_json(prov["circuit_json"]), load_circuit(fixture("grid2x3.json")));
}

TEST(cli, sample_zero_shots) {
    fs::path a = scratch_dir() / "empty.csv";
    auto r = run_cli("sample --circuit " + fixture("chain2.json") + " --shots 0 --seed 1 --out " + a.string());
    ASSERT_EQ(r.exit_code, 0);
    ASSERT_EQ(read_file(a), "bitstring,count\n");
}

TEST(cli, sample_rejects_non_simulable_circuit) {
    auto j = circuit_to_json(load_circuit(fixture("cycle4.json")));
    j["inputs"][0]["r"] = 0.5;
    fs::path p = scratch_dir() / "too_big.json";
    std::ofstream(p) << j.dump();
    auto r = run_cli("sample --circuit " + p.string() + " --shots 10 --seed 1 --out " +
                     (scratch_dir() / "x.csv").string());
    ASSERT_EQ(r.exit_code, 2);
}

TEST(cli, compare_reports_tv) {
    auto r = run_cli("compare --circuit " + fixture("chain2.json") + " --shots 100000 --seed 5");
    ASSERT_EQ(r.exit_code, 0);
    auto j = Json::parse(r.out);
    ASSERT_LE(j["tv"].get<double>(), 0.02);
    ASSERT_TRUE(j["epsilon_pass"].get<bool>());
    ASSERT_EQ(j["shots"], 100000);
}

TEST(cli, compare_over_dense_cap) {
    auto c = chain_circuit(kDenseQubitCap + 1, 0.1, MeasurementRule::xy_plane(0.2));
    fs::path p = scratch_dir() / "long.json";
    std::ofstream(p) << circuit_to_json(c).dump();
    ASSERT_EQ(run_cli("compare --circuit " + p.string() + " --shots 10 --seed 1").exit_code, 3);
}

TEST(cli, coarse_two_site_block) {
    auto r = run_cli("coarse --block 1x2 --mode plain --grid 256 --bisect-tol 1e-4");
    ASSERT_EQ(r.exit_code, 0);
    auto j = Json::parse(r.out);
    ASSERT_LE(j["r_lower"].get<double>(), 0.5);
    ASSERT_GE(j["r_upper"].get<double>(), 0.5);
    ASSERT_EQ(j["block"], "1x2");
}

TEST(cli, purify_default_and_explicit_angles) {
    auto r = run_cli("purify");
    ASSERT_EQ(r.exit_code, 0);
    auto j = Json::parse(r.out);
    ASSERT_NEAR(j["p_site"].get<double>(), 0.73, 0.005);
    ASSERT_TRUE(j["verdict"].get<bool>());
    r = run_cli("purify --angles 0.18pi,0.32pi,0.31pi");
    ASSERT_EQ(r.exit_code, 0);
    j = Json::parse(r.out);
    ASSERT_NEAR(j["p_site"].get<double>(), 0.73, 0.005);
    ASSERT_NEAR(j["r_max"].get<double>(), 0.844, 0.005);
}

TEST(cli, pbs_verify) {
    auto r = run_cli("pbs-verify --d 2 --n 2 --seed 3");
    ASSERT_EQ(r.exit_code, 0);
    auto j = Json::parse(r.out);
    ASSERT_GT(j["eta_bound"].get<double>(), 0);
    ASSERT_LE(j["phase_reconstruction_gap"].get<double>(), 1e-10);
}

TEST(cli, bad_arguments) {
    ASSERT_NE(run_cli("").exit_code, 0);
    ASSERT_NE(run_cli("sample --shots 3").exit_code, 0);
    ASSERT_EQ(run_cli("coarse --block 2by2").exit_code, 1);
}
