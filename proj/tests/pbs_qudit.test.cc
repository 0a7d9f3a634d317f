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

#include "cylsim/pbs_qudit.hpp"

#include <random>

#include "cylsim/cz_decomposition.hpp"
#include "gtest/gtest.h"

using namespace cylsim;

namespace {

QuditOperator random_hermitian(std::mt19937_64 &rng, int d) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(d, d);
    for (int i = 0; i < d; i++) {
        for (int j = 0; j < d; j++) {
            a(i, j) = Complex(g(rng), g(rng));
        }
    }
    Eigen::MatrixXcd h = a + a.adjoint();
    h(0, 0) += 3.0 * d;  // keep the trace away from zero
    return h / h.trace();
}

QuditString random_string(std::mt19937_64 &rng, std::size_t n, int d) {
    std::uniform_int_distribution<int> u(0, d - 1);
    QuditString s(n);
    for (auto &v : s) {
        v = u(rng);
    }
    return s;
}

}  // namespace

TEST(pbs_qudit, offdiag_identities) {
    std::mt19937_64 rng(1);
    for (int d : {2, 3, 4, 5}) {
        for (int t = 0; t < 10; t++) {
            auto gaps = offdiag_identity_check(random_hermitian(rng, d));
            ASSERT_LE(gaps.gap1, 1e-12) << d;
            ASSERT_LE(gaps.gap2, 1e-12) << d;
        }
    }
    ASSERT_THROW(offdiag_identity_check(Eigen::MatrixXcd::Identity(3, 3)), std::invalid_argument);
}

TEST(pbs_qudit, equatorial_completeness) {
    // Averaging |v><v| over a full phase grid gives I / d.
    for (int d : {2, 3, 4}) {
        const int grid = 4;
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
        std::vector<int> idx(static_cast<std::size_t>(d - 1), 0);
        int count = 0;
        while (true) {
            std::vector<double> ang;
            for (int i : idx) {
                ang.push_back(kTwoPi * i / grid);
            }
            auto v = EquatorialVector::from_angles(ang).vector();
            ASSERT_NEAR(v.norm(), 1, 1e-15);
            acc += v * v.adjoint();
            count++;
            std::size_t j = 0;
            while (j < idx.size() && ++idx[j] == grid) {
                idx[j] = 0;
                j++;
            }
            if (j == idx.size()) {
                break;
            }
        }
        acc /= count;
        ASSERT_LT((acc - Eigen::MatrixXcd::Identity(d, d) / d).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(pbs_qudit, dual_membership_qubit_case) {
    // For d = 2 the dual is the unit cylinder.
    Eigen::MatrixXcd rho(2, 2);
    rho << 0.5, 0.6, 0.6, 0.5;  // x = 1.2
    ASSERT_NEAR(dual_membership(rho, 16), -0.1, 1e-14);
    rho << 1.0, 0.5, 0.5, 0.0;  // z = 1, x = 1: a rim point
    ASSERT_NEAR(dual_membership(rho, 16), 0, 1e-14);
    ASSERT_NEAR(dual_membership(Eigen::MatrixXcd::Identity(3, 3) / 3.0, 8), 1.0 / 3, 1e-14);
}

TEST(pbs_qudit, phase_map_scales_offdiagonal) {
    std::mt19937_64 rng(2);
    auto rho = random_hermitian(rng, 3);
    auto out = qudit_phase_map(rho, 0.25);
    ASSERT_EQ(out.diagonal(), rho.diagonal());
    ASSERT_NEAR(std::abs(out(0, 2) - 0.25 * rho(0, 2)), 0, 1e-15);
    ASSERT_THROW(qudit_phase_map(rho, -0.1), std::invalid_argument);
}

TEST(pbs_qudit, qudit_index_roundtrip) {
    for (std::size_t idx = 0; idx < 27; idx++) {
        ASSERT_EQ(qudit_index(qudit_string(idx, 3, 3), 3), idx);
    }
    ASSERT_EQ(qudit_index({1, 0}, 3), 3u);
}

TEST(pbs_qudit, phase_decomposition_reconstructs) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t n : {2u, 3u}) {
        for (int d : {2, 3}) {
            for (int t = 0; t < 5; t++) {
                auto a = random_string(rng, n, d);
                auto x = random_string(rng, n, d);
                auto y = random_string(rng, n, d);
                if (x == y) {
                    y[0] = (y[0] + 1) % d;
                }
                Complex c(u(rng), u(rng));
                double w = 1 + 3 * std::abs(u(rng));
                auto dec = phase_decompose(a, x, y, c, w, d);
                ASSERT_EQ(dec.terms.size(), n == 2 ? 8u : 64u);
                double gap = (reconstruct(dec) - phase_target(a, x, y, c, w, d)).cwiseAbs().maxCoeff();
                ASSERT_LE(gap, 1e-10) << "n=" << n << " d=" << d;
            }
        }
    }
}

TEST(pbs_qudit, cross_terms_vanish) {
    for (std::size_t n = 2; n <= 4; n++) {
        ASSERT_LE(cross_term_audit(n), 1e-12);
    }
}

TEST(pbs_qudit, phase_decompose_rejects_bad_input) {
    ASSERT_THROW(phase_decompose({0, 0}, {0, 1}, {0, 1}, 1.0, 1, 2), std::invalid_argument);
    ASSERT_THROW(phase_decompose({0, 0}, {0, 2}, {0, 1}, 1.0, 1, 2), std::invalid_argument);
    ASSERT_THROW(phase_decompose({0}, {0, 1}, {1, 1}, 1.0, 1, 2), std::invalid_argument);
}

TEST(pbs_qudit, product_gates_are_recognized) {
    ASSERT_FALSE(is_product_diagonal(controlled_phase_diagonal(2), 2, 2));
    std::vector<Complex> local{1, std::polar(1.0, 0.3), std::polar(1.0, 0.7), std::polar(1.0, 1.0)};
    ASSERT_TRUE(is_product_diagonal(local, 2, 2));
    auto rep = estimate_c(local, 2, 2, 50, 8);
    ASSERT_TRUE(rep.product_gate);
    ASSERT_EQ(rep.eta_bound, 1);
}

TEST(pbs_qudit, qubit_cz_bound_below_critical_ratio) {
    // The phase construction certifies a ratio no larger than the optimal 1 / lambda.
    auto rep = estimate_c(controlled_phase_diagonal(2), 2, 2, 200, 16);
    ASSERT_FALSE(rep.product_gate);
    ASSERT_GT(rep.eta_bound, 0.05);
    ASSERT_LE(rep.eta_bound, 1 / symmetric_growth());
}

TEST(pbs_qudit, qutrit_controlled_phase_bound) {
    auto rep = estimate_c(controlled_phase_diagonal(3), 3, 2, 100, 12);
    ASSERT_GT(rep.eta_bound, 0);
    ASSERT_LT(rep.eta_bound, 1);
    ASSERT_THROW(estimate_c(controlled_phase_diagonal(3), 5, 2, 10, 4), ResourceCapExceeded);
}
