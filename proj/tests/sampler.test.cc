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

#include "cylsim/sampler.hpp"

#include "cylsim/oracle.hpp"
#include "cylsim/serialize.hpp"
#include "gtest/gtest.h"

using namespace cylsim;

namespace {

const StochasticRep &shared_rep() {
    static const StochasticRep rep = build_for_growth(symmetric_growth() * 1.001);
    return rep;
}

ClusterCircuit fixture(const std::string &name) {
    return load_circuit(std::string(CYLSIM_FIXTURE_DIR) + "/" + name);
}

}  // namespace

TEST(sampler, simulability_report) {
    const auto &rep = shared_rep();
    auto c = fixture("grid2x3.json");
    auto report = check_simulable(c, rep.growth);
    ASSERT_TRUE(report.simulable);
    ASSERT_EQ(report.vertices.size(), 6u);
    ASSERT_EQ(report.vertices[1].degree, 3u);
    c.inputs[1].r = 0.2;
    report = check_simulable(c, rep.growth);
    ASSERT_FALSE(report.simulable);
    ASSERT_FALSE(report.vertices[1].ok);
    ASSERT_THROW(sample(c, rep, 10, 1), NotSimulable);
}

TEST(sampler, sampler_law_equals_oracle) {
    // The sampler's exact output law (all branches, all outcomes) equals the
    // quantum distribution.
    const auto &rep = shared_rep();
    for (const char *name : {"chain2.json", "cycle4.json"}) {
        auto c = fixture(name);
        ASSERT_LT(tv_distance(sampler_exact_distribution(c, rep), exact_distribution(c)), 1e-9) << name;
    }
}

TEST(sampler, tv_to_oracle_on_fixtures) {
    const auto &rep = shared_rep();
    for (const char *name : {"chain2.json", "cycle4.json", "grid2x3.json"}) {
        auto c = fixture(name);
        auto table = sample(c, rep, 100000, 42);
        double tv = tv_distance(empirical_distribution(table), exact_distribution(c));
        ASSERT_LE(tv, 0.02) << name;
    }
}

TEST(sampler, seed_determinism_and_thread_independence) {
    const auto &rep = shared_rep();
    auto c = fixture("grid2x3.json");
    auto a = sample(c, rep, 5000, 7, 1);
    auto b = sample(c, rep, 5000, 7, 3);
    auto d = sample(c, rep, 5000, 8, 1);
    ASSERT_EQ(a, b);
    ASSERT_NE(a, d);
    uint64_t total = 0;
    for (const auto &[k, n] : a) {
        ASSERT_EQ(k.size(), 6u);
        total += n;
    }
    ASSERT_EQ(total, 5000u);
}

TEST(sampler, zero_shots) {
    ASSERT_TRUE(sample(fixture("chain2.json"), shared_rep(), 0, 1).empty());
}

TEST(sampler, zero_radius_is_nearly_deterministic) {
    auto c = chain_circuit(3, 0, MeasurementRule::z_basis());
    c.inputs[1] = CylinderExtremum(0, 0, -1);
    auto table = sample(c, shared_rep(), 1000, 3);
    ASSERT_EQ(table.size(), 1u);
    ASSERT_EQ(table.begin()->first, "010");
}

TEST(sampler, propagate_flags_dual_violation) {
    StochasticRep rep = shared_rep();
    auto c = chain_circuit(2, 0.9, MeasurementRule::z_basis());
    std::mt19937_64 rng(1);
    ASSERT_THROW(propagate(c, rep, rng), DualViolation);
}
