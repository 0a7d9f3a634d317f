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

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "cylsim/circuit.hpp"
#include "cylsim/coarse_grain.hpp"
#include "cylsim/cz_decomposition.hpp"
#include "cylsim/pbs_qudit.hpp"
#include "cylsim/purification.hpp"
#include "cylsim/sampler.hpp"
#include "json.hpp"

namespace cylsim {

using Json = nlohmann::json;

inline const char *measurement_kind_name(MeasurementKind k) {
    return k == MeasurementKind::ZBasis ? "ZBasis" : "XYPlane";
}

inline MeasurementKind parse_measurement_kind(const std::string &s) {
    if (s == "ZBasis" || s == "Z") {
        return MeasurementKind::ZBasis;
    }
    if (s == "XYPlane" || s == "XY") {
        return MeasurementKind::XYPlane;
    }
    throw std::invalid_argument("unknown measurement kind '" + s + "'");
}

inline Json circuit_to_json(const ClusterCircuit &c) {
    Json j;
    j["n_qubits"] = c.n_qubits;
    j["edges"] = Json::array();
    for (auto [u, v] : c.edges) {
        j["edges"].push_back({u, v});
    }
    j["inputs"] = Json::array();
    for (const auto &e : c.inputs) {
        j["inputs"].push_back({{"r", e.r}, {"theta", e.theta}, {"pole", e.pole}});
    }
    j["plan"] = Json::array();
    for (const auto &m : c.plan) {
        j["plan"].push_back({{"kind", measurement_kind_name(m.kind)},
                             {"base_alpha", m.base_alpha},
                             {"sign_deps", m.sign_deps},
                             {"shift_deps", m.shift_deps}});
    }
    j["order"] = c.order;
    return j;
}

inline ClusterCircuit circuit_from_json(const Json &j) {
    ClusterCircuit c;
    c.n_qubits = j.at("n_qubits").get<std::size_t>();
    for (const auto &e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) {
            throw std::invalid_argument("each edge must be a pair [u, v]");
        }
        c.edges.emplace_back(e[0].get<uint32_t>(), e[1].get<uint32_t>());
    }
    for (const auto &in : j.at("inputs")) {
        c.inputs.emplace_back(in.at("r").get<double>(), in.at("theta").get<double>(), in.at("pole").get<int>());
    }
    for (const auto &p : j.at("plan")) {
        MeasurementRule rule;
        rule.kind = parse_measurement_kind(p.at("kind").get<std::string>());
        rule.base_alpha = p.value("base_alpha", 0.0);
        rule.sign_deps = p.value("sign_deps", std::vector<uint32_t>{});
        rule.shift_deps = p.value("shift_deps", std::vector<uint32_t>{});
        c.plan.push_back(std::move(rule));
    }
    c.order = j.at("order").get<std::vector<uint32_t>>();
    c.validate();
    return c;
}

inline ClusterCircuit load_circuit(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open circuit file '" + path + "'");
    }
    return circuit_from_json(Json::parse(in));
}

/// Doubles are written in shortest round-trip form, so a dump/parse cycle
/// reproduces every value bit for bit. An infinite growth is stored as null.
inline Json rep_to_json(const StochasticRep &rep) {
    Json j;
    j["growth"] = std::isinf(rep.growth) ? Json(nullptr) : Json(rep.growth);
    j["grid_size"] = rep.grid_size;
    j["residual"] = rep.residual;
    j["branches"] = Json::array();
    for (const auto &b : rep.branches) {
        j["branches"].push_back({{"p", b.p}, {"dtheta_a", b.dtheta_a}, {"dtheta_b", b.dtheta_b}});
    }
    return j;
}

inline StochasticRep rep_from_json(const Json &j) {
    StochasticRep rep;
    rep.growth = j.at("growth").is_null() ? std::numeric_limits<double>::infinity() : j.at("growth").get<double>();
    rep.grid_size = j.value("grid_size", 0);
    rep.residual = j.value("residual", 0.0);
    double total = 0;
    for (const auto &b : j.at("branches")) {
        rep.branches.push_back({b.at("p").get<double>(), b.at("dtheta_a").get<double>(), b.at("dtheta_b").get<double>()});
        if (rep.branches.back().p < 0) {
            throw std::invalid_argument("branch probabilities must be non-negative");
        }
        total += rep.branches.back().p;
    }
    if (rep.branches.empty() || std::abs(total - 1) > 1e-9) {
        throw std::invalid_argument("branch probabilities must sum to 1");
    }
    return rep;
}

inline Json simulability_to_json(const SimulabilityReport &r) {
    Json j;
    j["growth"] = r.growth;
    j["simulable"] = r.simulable;
    j["vertices"] = Json::array();
    for (std::size_t v = 0; v < r.vertices.size(); v++) {
        const auto &b = r.vertices[v];
        j["vertices"].push_back(
            {{"vertex", v}, {"degree", b.degree}, {"radius", b.radius}, {"bound", b.bound}, {"ok", b.ok}});
    }
    return j;
}

inline Json s_estimate_to_json(const SEstimate &e) {
    Json j;
    j["block"] = e.block.label();
    j["mode"] = block_mode_name(e.block.mode);
    j["ext_counts"] = e.block.ext_counts;
    j["r_lower"] = e.lower;
    j["r_upper"] = e.upper_found ? Json(e.upper) : Json(nullptr);
    j["grid"] = e.search_grid;
    j["certified_grid"] = e.certified_grid;
    j["cell_half_width"] = e.cell_half_width;
    j["curvature_margin"] = e.curvature_margin;
    j["certification_gap"] = e.certification_gap;
    j["witness_assignment"] = e.witness.theta;
    j["witness_value"] = e.witness_value;
    return j;
}

inline Json chain_to_json(const ChainOptimum &o) {
    Json j;
    j["angles"] = o.protocol.angles;
    j["angles_over_pi"] = Json::array();
    for (double a : o.protocol.angles) {
        j["angles_over_pi"].push_back(a / std::numbers::pi);
    }
    j["lattice_angle"] = o.lattice_angle;
    j["p_site"] = o.p_site;
    j["r_max"] = o.r_max;
    j["feasible"] = o.feasible;
    j["verdict"] = percolation_verdict(o.p_site);
    return j;
}

inline Json estimate_c_to_json(const EstimateCReport &r, const std::string &gate_id) {
    Json j;
    j["d"] = r.d;
    j["N"] = r.n;
    j["gate_id"] = gate_id;
    j["eta_bound"] = r.eta_bound;
    j["kind"] = "construction lower bound";
    j["product_gate"] = r.product_gate;
    j["max_pairs"] = r.max_pairs;
    j["grid_params"] = {{"eta_grid", r.eta_grid}, {"meas_grid", r.meas_grid}};
    return j;
}

}  // namespace cylsim
