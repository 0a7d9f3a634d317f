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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cylsim/geometry.hpp"

namespace cylsim {

/// Adaptive measurement of one vertex. The XY angle used is
/// (-1)^(sign parity) * base_alpha + pi * (shift parity), where the parities
/// are taken over the outcomes of the listed vertices. Z measurements ignore
/// their dependencies.
struct MeasurementRule {
    MeasurementKind kind = MeasurementKind::ZBasis;
    double base_alpha = 0;
    std::vector<uint32_t> sign_deps;
    std::vector<uint32_t> shift_deps;

    static MeasurementRule z_basis() {
        return {};
    }
    static MeasurementRule xy_plane(double alpha, std::vector<uint32_t> sign_deps = {}, std::vector<uint32_t> shift_deps = {}) {
        return {MeasurementKind::XYPlane, alpha, std::move(sign_deps), std::move(shift_deps)};
    }

    /// Resolves the measurement given outcomes indexed by vertex.
    Measurement resolve(const std::vector<uint8_t> &outcomes) const {
        if (kind == MeasurementKind::ZBasis) {
            return Measurement::z_basis();
        }
        int sign = 0;
        for (auto v : sign_deps) {
            sign ^= outcomes.at(v) & 1;
        }
        int shift = 0;
        for (auto v : shift_deps) {
            shift ^= outcomes.at(v) & 1;
        }
        double a = sign ? -base_alpha : base_alpha;
        if (shift) {
            a += std::numbers::pi;
        }
        return Measurement::xy_plane(a);
    }

    bool operator==(const MeasurementRule &) const = default;
};

/// Cylinder-extremum inputs, a set of CZ gates, and an adaptive measurement
/// plan. Outcome bitstrings list vertex 0 first.
struct ClusterCircuit {
    std::size_t n_qubits = 0;
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    std::vector<CylinderExtremum> inputs;
    std::vector<MeasurementRule> plan;
    std::vector<uint32_t> order;

    /// Throws std::invalid_argument on any structural problem.
    void validate() const {
        if (inputs.size() != n_qubits || plan.size() != n_qubits || order.size() != n_qubits) {
            throw std::invalid_argument("inputs, plan and order must each have one entry per qubit");
        }
        std::vector<std::pair<uint32_t, uint32_t>> seen;
        for (auto [u, v] : edges) {
            if (u >= n_qubits || v >= n_qubits) {
                throw std::invalid_argument("edge endpoint out of range");
            }
            if (u == v) {
                throw std::invalid_argument("self-edges are not allowed");
            }
            seen.emplace_back(std::min(u, v), std::max(u, v));
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
            throw std::invalid_argument("duplicate edge");
        }
        std::vector<std::size_t> position(n_qubits, n_qubits);
        for (std::size_t k = 0; k < order.size(); k++) {
            if (order[k] >= n_qubits || position[order[k]] != n_qubits) {
                throw std::invalid_argument("order must be a permutation of the vertices");
            }
            position[order[k]] = k;
        }
        for (std::size_t v = 0; v < n_qubits; v++) {
            for (const auto *deps : {&plan[v].sign_deps, &plan[v].shift_deps}) {
                for (auto d : *deps) {
                    if (d >= n_qubits || position[d] >= position[v]) {
                        throw std::invalid_argument(
                            "measurement of vertex " + std::to_string(v) + " depends on a vertex measured later");
                    }
                }
            }
        }
    }

    std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> d(n_qubits, 0);
        for (auto [u, v] : edges) {
            d.at(u)++;
            d.at(v)++;
        }
        return d;
    }

    bool operator==(const ClusterCircuit &) const = default;
};

namespace detail {
inline ClusterCircuit uniform_circuit(std::size_t n, double r, const MeasurementRule &rule) {
    ClusterCircuit c;
    c.n_qubits = n;
    c.inputs.assign(n, CylinderExtremum(r, 0, +1));
    c.plan.assign(n, rule);
    for (std::size_t v = 0; v < n; v++) {
        c.order.push_back(static_cast<uint32_t>(v));
    }
    return c;
}
}  // namespace detail

/// Path 0 - 1 - ... - (n-1) with uniform inputs and measurements.
inline ClusterCircuit chain_circuit(std::size_t n, double r, const MeasurementRule &rule) {
    ClusterCircuit c = detail::uniform_circuit(n, r, rule);
    for (std::size_t v = 0; v + 1 < n; v++) {
        c.edges.emplace_back(static_cast<uint32_t>(v), static_cast<uint32_t>(v + 1));
    }
    return c;
}

inline ClusterCircuit cycle_circuit(std::size_t n, double r, const MeasurementRule &rule) {
    if (n < 3) {
        throw std::invalid_argument("a cycle needs at least 3 vertices");
    }
    ClusterCircuit c = chain_circuit(n, r, rule);
    c.edges.emplace_back(static_cast<uint32_t>(n - 1), 0);
    return c;
}

/// Rectangular nearest-neighbour grid; vertex (i, j) has index i * width + j.
inline ClusterCircuit grid_circuit(std::size_t height, std::size_t width, double r, const MeasurementRule &rule) {
    ClusterCircuit c = detail::uniform_circuit(height * width, r, rule);
    for (std::size_t i = 0; i < height; i++) {
        for (std::size_t j = 0; j < width; j++) {
            auto v = static_cast<uint32_t>(i * width + j);
            if (j + 1 < width) {
                c.edges.emplace_back(v, v + 1);
            }
            if (i + 1 < height) {
                c.edges.emplace_back(v, static_cast<uint32_t>(v + width));
            }
        }
    }
    return c;
}

}  // namespace cylsim
