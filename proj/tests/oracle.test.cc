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

#include "cylsim/oracle.hpp"

#include <random>
#include <sstream>

#include "gtest/gtest.h"

using namespace cylsim;

namespace {

/// Brute-force oracle: full Kronecker product, diagonal CZ signs, and one
/// trace per outcome string with every projector applied at once.
std::map<std::string, double> brute_force_distribution(const ClusterCircuit &c) {
    const std::size_t n = c.n_qubits;
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Ones(1, 1);
    for (std::size_t q = n; q-- > 0;) {
        auto op = to_bloch(c.inputs[q]);
        Eigen::Matrix2cd m;
        m << (1 + op.z) / 2, std::complex<double>(op.x, -op.y) / 2.0, std::complex<double>(op.x, op.y) / 2.0,
            (1 - op.z) / 2;
        Eigen::MatrixXcd next(rho.rows() * 2, rho.cols() * 2);
        for (Eigen::Index i = 0; i < rho.rows(); i++) {
            for (Eigen::Index j = 0; j < rho.cols(); j++) {
                next.block(2 * i, 2 * j, 2, 2) = rho(i, j) * m;
            }
        }
        rho = next;
    }
    // The last factor is the lowest bit, so qubit q is bit q.
    Eigen::MatrixXcd r2 = rho;
    Eigen::VectorXcd sign = Eigen::VectorXcd::Ones(dim);
    for (auto [u, v] : c.edges) {
        for (std::size_t i = 0; i < dim; i++) {
            if (((i >> u) & 1) && ((i >> v) & 1)) {
                sign(i) = -sign(i);
            }
        }
    }
    r2 = sign.asDiagonal() * r2 * sign.asDiagonal();

    std::map<std::string, double> dist;
    for (std::size_t s = 0; s < dim; s++) {
        std::vector<uint8_t> out(n);
        std::string key(n, '0');
        for (std::size_t q = 0; q < n; q++) {
            out[q] = (s >> q) & 1;
            key[q] = out[q] ? '1' : '0';
        }
        Eigen::MatrixXcd proj = Eigen::MatrixXcd::Ones(1, 1);
        for (std::size_t q = n; q-- > 0;) {
            Measurement m = c.plan[q].resolve(out);
            double sg = out[q] ? -1 : 1;
            Eigen::Matrix2cd p;
            if (m.kind == MeasurementKind::ZBasis) {
                p << (1 + sg) / 2, 0, 0, (1 - sg) / 2;
            } else {
                auto e = sg * std::polar(0.5, -m.alpha);
                p << 0.5, e, std::conj(e), 0.5;
            }
            Eigen::MatrixXcd next(proj.rows() * 2, proj.cols() * 2);
            for (Eigen::Index i = 0; i < proj.rows(); i++) {
                for (Eigen::Index j = 0; j < proj.cols(); j++) {
                    next.block(2 * i, 2 * j, 2, 2) = proj(i, j) * p;
                }
            }
            proj = next;
        }
        dist[key] = (r2 * proj).trace().real();
    }
    return dist;
}

ClusterCircuit random_circuit(std::mt19937_64 &rng, std::size_t n, double r) {
    std::uniform_real_distribution<double> ang(0, kTwoPi);
    auto c = chain_circuit(n, r, MeasurementRule::z_basis());
    if (n > 2) {
        c.edges.emplace_back(0, static_cast<uint32_t>(n - 1));
    }
    for (std::size_t v = 0; v < n; v++) {
        c.inputs[v] = CylinderExtremum(r, ang(rng), v % 2 ? -1 : 1);
        if (v % 3 != 2) {
            std::vector<uint32_t> deps;
            if (v > 0) {
                deps.push_back(static_cast<uint32_t>(v - 1));
            }
            c.plan[v] = MeasurementRule::xy_plane(ang(rng), deps, v > 1 ? std::vector<uint32_t>{0} : std::vector<uint32_t>{});
        }
    }
    return c;
}

}  // namespace

TEST(oracle, matches_brute_force_on_adaptive_circuits) {
    std::mt19937_64 rng(3);
    for (std::size_t n : {2u, 3u, 5u}) {
        auto c = random_circuit(rng, n, 0.6);
        auto fast = exact_distribution(c, 0);
        auto slow = brute_force_distribution(c);
        ASSERT_LT(tv_distance(fast, slow), 1e-12) << n;
    }
}

TEST(oracle, distribution_sums_to_one) {
    std::mt19937_64 rng(4);
    auto c = random_circuit(rng, 6, 1.5);
    double total = 0;
    for (const auto &[k, v] : exact_distribution(c)) {
        total += v;
    }
    ASSERT_NEAR(total, 1, 1e-12);
}

TEST(oracle, pruning_does_not_change_the_distribution) {
    std::mt19937_64 rng(8);
    auto c = random_circuit(rng, 5, 0.3);
    ASSERT_LT(tv_distance(exact_distribution(c), exact_distribution(c, 0)), 1e-12);
}

TEST(oracle, zero_radius_is_classical) {
    // Z eigenstates: CZ only adds phases, Z results are fixed and XY results are uniform.
    auto c = chain_circuit(3, 0, MeasurementRule::z_basis());
    c.inputs[1] = CylinderExtremum(0, 0, -1);
    c.plan[2] = MeasurementRule::xy_plane(0.7);
    auto d = exact_distribution(c);
    ASSERT_NEAR(d["010"], 0.5, 1e-15);
    ASSERT_NEAR(d["011"], 0.5, 1e-15);
    ASSERT_NEAR(tv_distance(d, std::map<std::string, double>{{"010", 0.5}, {"011", 0.5}}), 0, 1e-15);
}

TEST(oracle, z_outcomes_are_marginals) {
    // A Z result on vertex 1 equals the sum over both XY results on vertex 1.
    std::mt19937_64 rng(9);
    auto c = random_circuit(rng, 4, 0.4);
    for (auto &rule : c.plan) {
        rule = MeasurementRule::xy_plane(0.9);
    }
    auto z = c;
    z.plan[1] = MeasurementRule::z_basis();
    auto dz = exact_distribution(z, 0);
    auto dxy = exact_distribution(c, 0);
    std::map<std::string, double> marg_z;
    std::map<std::string, double> marg_xy;
    for (const auto &[k, v] : dz) {
        marg_z[k.substr(0, 1) + k.substr(2)] += v;
    }
    for (const auto &[k, v] : dxy) {
        marg_xy[k.substr(0, 1) + k.substr(2)] += v;
    }
    ASSERT_LT(tv_distance(marg_z, marg_xy), 1e-12);
}

TEST(oracle, dense_cap) {
    auto c = chain_circuit(kDenseQubitCap + 1, 0.1, MeasurementRule::z_basis());
    ASSERT_THROW(dense_output(c), ResourceCapExceeded);
    ASSERT_THROW(exact_distribution(c), ResourceCapExceeded);
}

TEST(oracle, pauli_coefficients_of_product) {
    auto c = chain_circuit(2, 0.5, MeasurementRule::z_basis());
    c.edges.clear();
    c.inputs[0] = CylinderExtremum(0.5, 0.3, 1);
    c.inputs[1] = CylinderExtremum(0.2, 1.1, -1);
    auto m = pauli_coefficients(dense_output(c));
    auto expected = PauliCoeffMatrix::product(to_bloch(c.inputs[0]), to_bloch(c.inputs[1]));
    ASSERT_LT(m.max_abs_diff(expected), 1e-15);
}

TEST(oracle, marginal_invariance_across_cut) {
    auto one = chain_circuit(4, 0.3, MeasurementRule::z_basis());
    one.inputs[2] = CylinderExtremum(0.3, 1.0, 1);
    ASSERT_LT(marginal_invariance_check(one, {0, 1}), 1e-12);
    auto two = grid_circuit(2, 2, 0.4, MeasurementRule::z_basis());
    two.inputs[3] = CylinderExtremum(0.4, 2.0, 1);
    ASSERT_LT(marginal_invariance_check(two, {0, 2}), 1e-12);
}

TEST(oracle, marginal_invariance_requires_upper_pole) {
    auto c = chain_circuit(2, 0.3, MeasurementRule::z_basis());
    c.inputs[1] = CylinderExtremum(0.3, 1.0, -1);
    ASSERT_THROW(marginal_invariance_check(c, {0}), std::invalid_argument);
    // The marginal of vertex 0 is its input with the transverse part flipped.
    DenseMatrix m = partial_trace(dense_output(c), {0});
    ASSERT_NEAR(m(0, 1).real(), -0.15, 1e-15);
}

TEST(oracle, csv_format) {
    std::ostringstream out;
    write_distribution_csv(out, {{"01", 0.25}, {"10", 0.75}});
    ASSERT_EQ(out.str(), "bitstring,value\n01,0.25\n10,0.75\n");
}
