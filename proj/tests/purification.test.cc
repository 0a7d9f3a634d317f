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

#include "cylsim/purification.hpp"

#include <Eigen/Dense>

#include "gtest/gtest.h"

using namespace cylsim;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector2d ket(double phi) {
    return {std::cos(phi / 2), std::sin(phi / 2)};
}

/// Dense oracle: unnormalized partner operator after CZ and the carrier's X
/// outcome. Index 2 * carrier + partner.
Eigen::Matrix2d dense_partner(double phi1, double phi2, int outcome) {
    Eigen::Vector4d psi;
    auto a = ket(phi1);
    auto b = ket(phi2);
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            psi(2 * i + j) = a(i) * b(j);
        }
    }
    psi(3) = -psi(3);
    Eigen::Matrix4d rho = psi * psi.transpose();
    double sign = outcome == 0 ? 1 : -1;
    Eigen::Matrix2d proj;
    proj << 0.5, sign / 2, sign / 2, 0.5;
    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    for (int i1 = 0; i1 < 2; i1++) {
        for (int i2 = 0; i2 < 2; i2++) {
            for (int j1 = 0; j1 < 2; j1++) {
                for (int j2 = 0; j2 < 2; j2++) {
                    out(j1, j2) += proj(i2, i1) * rho(2 * i1 + j1, 2 * i2 + j2);
                }
            }
        }
    }
    return out;
}

}  // namespace

TEST(purification, closed_forms_match_dense_oracle) {
    double worst = 0;
    for (int i = 0; i < 50; i++) {
        for (int j = 0; j < 50; j++) {
            double phi1 = kTwoPi * i / 50;
            double phi2 = kTwoPi * j / 50;
            auto probs = branch_probs(phi1, phi2);
            Eigen::Matrix2d fail = dense_partner(phi1, phi2, 0);
            Eigen::Matrix2d succ = dense_partner(phi1, phi2, 1);
            worst = std::max(worst, std::abs(fail.trace() - probs.p0));
            worst = std::max(worst, std::abs(succ.trace() - probs.p1));
            auto kf = ket(failure_angle(phi1, phi2));
            auto ks = ket(success_angle(phi1, phi2));
            worst = std::max(worst, (fail - probs.p0 * kf * kf.transpose()).cwiseAbs().maxCoeff());
            worst = std::max(worst, (succ - probs.p1 * ks * ks.transpose()).cwiseAbs().maxCoeff());
        }
    }
    ASSERT_LE(worst, 1e-12);
}

TEST(purification, success_gives_plus_state_on_constraint) {
    for (double phi1 : {0.1, 0.7, 2.0, 4.0}) {
        ASSERT_NEAR(angle_distance(success_angle(phi1, kPi / 2 - phi1), kPi / 2), 0, 1e-12);
    }
}

TEST(purification, reference_protocol) {
    ChainProtocol p{{0.18 * kPi, 0.32 * kPi, 0.31 * kPi}, 0.01 * kPi};
    double ps = site_success_prob(p);
    ASSERT_NEAR(ps, 0.73, 0.005);
    ASSERT_NEAR(chain_r_max(p), 0.844, 0.005);
    ASSERT_TRUE(percolation_verdict(ps));
    // The rounded angles violate the exact chain constraint.
    p.constraint_tol = 1e-9;
    ASSERT_THROW(site_success_prob(p), ConstraintViolation);
}

TEST(purification, site_probability_is_sequential_success) {
    auto p = ChainProtocol::derived(0.3, 4);
    auto t = trace_chain(p);
    ASSERT_EQ(t.success.size(), 4u);
    double expected = 0;
    double fail = 1;
    for (double s : t.success) {
        expected += fail * s;
        fail *= 1 - s;
    }
    ASSERT_NEAR(site_success_prob(p), expected, 1e-15);
    ASSERT_NEAR(angle_distance(t.carrier.back() + t.lattice_angle, kPi / 2), 0, 1e-12);
}

TEST(purification, monte_carlo_agrees) {
    ChainProtocol p{{0.18 * kPi, 0.32 * kPi, 0.31 * kPi}, 0.01 * kPi};
    ASSERT_NEAR(simulate_chain(p, 200000, 5), site_success_prob(p), 0.005);
    auto q = ChainProtocol::derived(1.0, 2);
    ASSERT_NEAR(simulate_chain(q, 200000, 6), site_success_prob(q), 0.005);
}

TEST(purification, optimizer) {
    auto one = optimize_angles(1, 1);
    ASSERT_TRUE(one.feasible);
    ASSERT_NEAR(one.p_site, 0.5, 1e-9);
    auto three = optimize_angles(3, 0.845);
    ASSERT_TRUE(three.feasible);
    ASSERT_LE(three.r_max, 0.845 + 1e-12);
    ASSERT_GE(three.p_site, 0.73);
    ASSERT_TRUE(percolation_verdict(three.p_site));
    auto free3 = optimize_angles(3, 1);
    ASSERT_GE(free3.p_site, three.p_site);
    auto none = optimize_angles(3, 0);
    ASSERT_FALSE(none.feasible);
    ASSERT_THROW(optimize_angles(0, 1), std::invalid_argument);
}
