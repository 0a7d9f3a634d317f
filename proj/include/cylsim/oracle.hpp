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

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cylsim/circuit.hpp"
#include "cylsim/cz_decomposition.hpp"
#include "cylsim/geometry.hpp"

namespace cylsim {

inline constexpr std::size_t kDenseQubitCap = 14;

class ResourceCapExceeded : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;

/// A unit-trace Hermitian operator on n qubits (positivity not required).
/// Basis index bit q holds qubit q.
struct DenseOperator {
    std::size_t n_qubits = 0;
    DenseMatrix entries;

    std::size_t dim() const {
        return std::size_t{1} << n_qubits;
    }
};

inline Eigen::Matrix2cd single_qubit_matrix(const CylinderOperator &op) {
    Eigen::Matrix2cd m;
    m << Complex(1 + op.z, 0) / 2.0, Complex(op.x, -op.y) / 2.0, Complex(op.x, op.y) / 2.0, Complex(1 - op.z, 0) / 2.0;
    return m;
}

/// Projector for one outcome of a permitted measurement.
inline Eigen::Matrix2cd measurement_projector(const Measurement &m, int outcome) {
    Eigen::Matrix2cd p;
    if (m.kind == MeasurementKind::ZBasis) {
        p << (outcome == 0 ? 1 : 0), 0, 0, (outcome == 0 ? 0 : 1);
        return p;
    }
    double s = outcome == 0 ? 1.0 : -1.0;
    Complex e = std::polar(1.0, m.alpha);
    p << 0.5, s * std::conj(e) / 2.0, s * e / 2.0, 0.5;
    return p;
}

inline Eigen::Matrix2cd pauli_matrix(int k) {
    Eigen::Matrix2cd m;
    switch (k) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

/// Tensor product of per-qubit operators, qubit 0 in the lowest bit.
inline DenseMatrix product_operator(const std::vector<Eigen::Matrix2cd> &factors) {
    DenseMatrix m = DenseMatrix::Ones(1, 1);
    for (const auto &f : factors) {
        DenseMatrix next(2 * m.rows(), 2 * m.cols());
        for (int a = 0; a < 2; a++) {
            for (int b = 0; b < 2; b++) {
                next.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) = f(a, b) * m;
            }
        }
        m = std::move(next);
    }
    return m;
}

/// Conjugates by CZ(u, v): a diagonal sign on rows and columns.
inline void apply_cz(DenseMatrix &m, uint32_t u, uint32_t v) {
    const auto n = static_cast<std::size_t>(m.rows());
    auto sign = [&](std::size_t i) { return ((i >> u) & (i >> v) & 1) ? -1.0 : 1.0; };
    for (std::size_t j = 0; j < n; j++) {
        double sj = sign(j);
        for (std::size_t i = 0; i < n; i++) {
            if (sign(i) * sj < 0) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *= -1.0;
            }
        }
    }
}

namespace detail {
inline void check_dense_cap(std::size_t n) {
    if (n > kDenseQubitCap) {
        throw ResourceCapExceeded("dense backend supports at most " + std::to_string(kDenseQubitCap) + " qubits, got " +
                                  std::to_string(n));
    }
}
}  // namespace detail

/// The product of input operators conjugated by every CZ of the circuit.
inline DenseOperator dense_output(const ClusterCircuit &c) {
    detail::check_dense_cap(c.n_qubits);
    std::vector<Eigen::Matrix2cd> factors;
    for (const auto &e : c.inputs) {
        factors.push_back(single_qubit_matrix(to_bloch(e)));
    }
    DenseOperator op{c.n_qubits, product_operator(factors)};
    for (auto [u, v] : c.edges) {
        apply_cz(op.entries, u, v);
    }
    return op;
}

/// c[i][j] = tr(rho sigma_i (x) sigma_j), qubit 0 indexing rows.
inline PauliCoeffMatrix pauli_coefficients(const DenseOperator &op) {
    if (op.n_qubits != 2) {
        throw std::invalid_argument("Pauli coefficient extraction needs a two-qubit operator");
    }
    PauliCoeffMatrix m;
    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < 4; j++) {
            DenseMatrix p = product_operator({pauli_matrix(i), pauli_matrix(j)});
            m.c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (op.entries * p).trace().real();
        }
    }
    return m;
}

/// Contracts qubit `pos` of m against the 2x2 operator p: tr_q((p (x) I) m).
inline DenseMatrix contract_qubit(const DenseMatrix &m, std::size_t pos, const Eigen::Matrix2cd &p) {
    const std::size_t dim = static_cast<std::size_t>(m.rows());
    const std::size_t half = dim / 2;
    const std::size_t low = (std::size_t{1} << pos) - 1;
    auto insert = [&](std::size_t i, std::size_t bit) { return (i & low) | (bit << pos) | ((i & ~low) << 1); };
    DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(half), static_cast<Eigen::Index>(half));
    for (std::size_t j = 0; j < half; j++) {
        for (std::size_t i = 0; i < half; i++) {
            Complex acc = 0;
            for (std::size_t a = 0; a < 2; a++) {
                for (std::size_t b = 0; b < 2; b++) {
                    if (p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) == Complex(0)) {
                        continue;
                    }
                    acc += p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
                           m(static_cast<Eigen::Index>(insert(i, b)), static_cast<Eigen::Index>(insert(j, a)));
                }
            }
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
        }
    }
    return out;
}

/// Signed outcome measure of the circuit. Outcome histories are expanded
/// depth-first in measurement order; a branch is dropped once every entry
/// of its remaining operator is below prune_tol in magnitude.
inline std::map<std::string, double> exact_distribution(const ClusterCircuit &c, double prune_tol = 1e-14) {
    c.validate();
    DenseOperator root = dense_output(c);
    std::map<std::string, double> dist;
    std::vector<uint8_t> outcomes(c.n_qubits, 0);
    auto recurse = [&](auto &self, std::size_t k, const DenseMatrix &m, const std::vector<uint32_t> &alive) -> void {
        if (k == c.order.size()) {
            std::string key(c.n_qubits, '0');
            for (std::size_t v = 0; v < c.n_qubits; v++) {
                key[v] = outcomes[v] ? '1' : '0';
            }
            dist[key] += m(0, 0).real();
            return;
        }
        uint32_t v = c.order[k];
        std::size_t pos = static_cast<std::size_t>(std::find(alive.begin(), alive.end(), v) - alive.begin());
        std::vector<uint32_t> rest = alive;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pos));
        Measurement meas = c.plan[v].resolve(outcomes);
        for (uint8_t bit = 0; bit < 2; bit++) {
            DenseMatrix next = contract_qubit(m, pos, measurement_projector(meas, bit));
            if (next.cwiseAbs().maxCoeff() < prune_tol) {
                continue;
            }
            outcomes[v] = bit;
            self(self, k + 1, next, rest);
        }
        outcomes[v] = 0;
    };
    std::vector<uint32_t> alive;
    for (uint32_t v = 0; v < c.n_qubits; v++) {
        alive.push_back(v);
    }
    recurse(recurse, 0, root.entries, alive);
    return dist;
}

/// Half the L1 distance; missing keys count as zero.
template <typename MapA, typename MapB>
double tv_distance(const MapA &p, const MapB &q) {
    std::map<std::string, double> diff;
    for (const auto &[k, v] : p) {
        diff[k] += static_cast<double>(v);
    }
    for (const auto &[k, v] : q) {
        diff[k] -= static_cast<double>(v);
    }
    double s = 0;
    for (const auto &[k, v] : diff) {
        s += std::abs(v);
    }
    return s / 2;
}

/// Traces out every qubit not in `keep` (ascending order preserved).
inline DenseMatrix partial_trace(const DenseOperator &op, const std::vector<uint32_t> &keep) {
    DenseMatrix m = op.entries;
    std::vector<uint32_t> alive;
    for (uint32_t v = 0; v < op.n_qubits; v++) {
        alive.push_back(v);
    }
    for (uint32_t v = 0; v < op.n_qubits; v++) {
        if (std::find(keep.begin(), keep.end(), v) != keep.end()) {
            continue;
        }
        auto pos = static_cast<std::size_t>(std::find(alive.begin(), alive.end(), v) - alive.begin());
        m = contract_qubit(m, pos, Eigen::Matrix2cd::Identity());
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    return m;
}

/// Splits the vertices into `region` and its complement, and returns the
/// largest change of either marginal caused by the CZs that cross the cut.
/// Inputs must be pole +1 extrema: tracing out a pole -1 partner of a CZ
/// flips the transverse part, so invariance holds only up to a Z rotation.
inline double marginal_invariance_check(const ClusterCircuit &c, const std::vector<uint32_t> &region) {
    detail::check_dense_cap(c.n_qubits);
    for (const auto &e : c.inputs) {
        if (e.pole != 1) {
            throw std::invalid_argument("marginal invariance needs pole +1 inputs");
        }
    }
    std::vector<bool> in_k(c.n_qubits, false);
    for (auto v : region) {
        in_k.at(v) = true;
    }
    std::vector<uint32_t> complement;
    for (uint32_t v = 0; v < c.n_qubits; v++) {
        if (!in_k[v]) {
            complement.push_back(v);
        }
    }
    ClusterCircuit cut = c;
    cut.edges.clear();
    for (auto e : c.edges) {
        if (in_k[e.first] == in_k[e.second]) {
            cut.edges.push_back(e);
        }
    }
    DenseOperator with = dense_output(c);
    DenseOperator without = dense_output(cut);
    double dev = 0;
    for (const std::vector<uint32_t> *side : {&region, static_cast<const std::vector<uint32_t> *>(&complement)}) {
        std::vector<uint32_t> keep = *side;
        std::sort(keep.begin(), keep.end());
        DenseMatrix d = partial_trace(with, keep) - partial_trace(without, keep);
        dev = std::max(dev, d.cwiseAbs().maxCoeff());
    }
    return dev;
}

/// Writes `bitstring,value` rows with 17 significant digits.
inline void write_distribution_csv(std::ostream &out, const std::map<std::string, double> &dist) {
    out << "bitstring,value\n";
    out << std::setprecision(17);
    for (const auto &[k, v] : dist) {
        out << k << ',' << v << '\n';
    }
}

}  // namespace cylsim
