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
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cylsim/circuit.hpp"
#include "cylsim/cz_decomposition.hpp"
#include "cylsim/geometry.hpp"

namespace cylsim {

struct VertexBound {
    std::size_t degree = 0;
    double radius = 0;
    double bound = 1;
    bool ok = true;
};

struct SimulabilityReport {
    double growth = 1;
    std::vector<VertexBound> vertices;
    bool simulable = true;
};

/// Per-vertex check r_v <= growth^(-D_v).
inline SimulabilityReport check_simulable(const ClusterCircuit &c, double growth, double tol = kMembershipTol) {
    SimulabilityReport report;
    report.growth = growth;
    auto deg = c.degrees();
    for (std::size_t v = 0; v < c.n_qubits; v++) {
        VertexBound b;
        b.degree = deg[v];
        b.radius = c.inputs[v].r;
        b.bound = std::pow(growth, -static_cast<double>(deg[v]));
        b.ok = b.radius <= b.bound + tol;
        report.simulable = report.simulable && b.ok;
        report.vertices.push_back(b);
    }
    return report;
}

class NotSimulable : public std::runtime_error {
   public:
    explicit NotSimulable(SimulabilityReport report)
        : std::runtime_error("circuit inputs exceed the per-vertex radius bound"), report_(std::move(report)) {
    }
    const SimulabilityReport &report() const {
        return report_;
    }

   private:
    SimulabilityReport report_;
};

/// An intermediate operator left the unit cylinder.
class DualViolation : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

using OutcomeTable = std::map<std::string, uint64_t>;

namespace detail {
inline void require_simulable(const ClusterCircuit &c, const StochasticRep &rep) {
    auto report = check_simulable(c, rep.growth);
    if (!report.simulable) {
        throw NotSimulable(std::move(report));
    }
}

inline std::string to_bitstring(const std::vector<uint8_t> &outcomes) {
    std::string s(outcomes.size(), '0');
    for (std::size_t v = 0; v < outcomes.size(); v++) {
        s[v] = outcomes[v] ? '1' : '0';
    }
    return s;
}

/// Samples the terminal measurements of a product of extrema.
template <typename Draw>
std::string measure_all(const ClusterCircuit &c, const std::vector<CylinderExtremum> &state, Draw &&draw) {
    std::vector<uint8_t> outcomes(c.n_qubits, 0);
    for (auto v : c.order) {
        Measurement m = c.plan[v].resolve(outcomes);
        double p0 = std::clamp(measure_prob(to_bloch(state[v]), m, 0), 0.0, 1.0);
        outcomes[v] = draw() < p0 ? 0 : 1;
    }
    return to_bitstring(outcomes);
}

inline std::mt19937_64 shot_stream(uint64_t seed, uint64_t shot) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(shot),
                      static_cast<uint32_t>(shot >> 32)};
    return std::mt19937_64(seq);
}
}  // namespace detail

/// Applies every CZ stochastically and returns the resulting product of
/// extrema. Throws DualViolation if a radius leaves the unit cylinder.
template <typename Rng>
std::vector<CylinderExtremum> propagate(const ClusterCircuit &c, const StochasticRep &rep, Rng &rng,
                                        double tol = kMembershipTol) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<CylinderExtremum> state = c.inputs;
    for (auto [u, v] : c.edges) {
        auto [a, b] = apply_stochastic(state[u], state[v], rep, unif(rng));
        if (a.r > 1 + tol || b.r > 1 + tol) {
            throw DualViolation("intermediate radius exceeds 1 on edge (" + std::to_string(u) + ", " +
                                std::to_string(v) + ")");
        }
        state[u] = a;
        state[v] = b;
    }
    return state;
}

/// One shot: stochastic gates followed by adaptive Born-rule sampling.
template <typename Rng>
std::string run_shot(const ClusterCircuit &c, const StochasticRep &rep, Rng &rng) {
    auto state = propagate(c, rep, rng);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return detail::measure_all(c, state, [&] { return unif(rng); });
}

/// Aggregates `shots` independent shots. Shot k uses a stream derived from
/// (seed, k) only, so results do not depend on the thread count.
inline OutcomeTable sample(const ClusterCircuit &c, const StochasticRep &rep, uint64_t shots, uint64_t seed,
                           unsigned threads = 1) {
    c.validate();
    detail::require_simulable(c, rep);
    threads = std::max(1u, threads);
    if (shots < threads) {
        threads = static_cast<unsigned>(std::max<uint64_t>(1, shots));
    }
    std::vector<OutcomeTable> partial(threads);
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned t) {
        try {
            uint64_t begin = shots * t / threads;
            uint64_t end = shots * (t + 1) / threads;
            for (uint64_t k = begin; k < end; k++) {
                auto rng = detail::shot_stream(seed, k);
                partial[t][run_shot(c, rep, rng)]++;
            }
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; t++) {
            pool.emplace_back(work, t);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    OutcomeTable total;
    for (auto &p : partial) {
        for (auto &[k, n] : p) {
            total[k] += n;
        }
    }
    return total;
}

/// Normalizes counts into a distribution.
inline std::map<std::string, double> empirical_distribution(const OutcomeTable &table) {
    uint64_t n = 0;
    for (auto &[k, cnt] : table) {
        n += cnt;
    }
    std::map<std::string, double> out;
    for (auto &[k, cnt] : table) {
        out[k] = static_cast<double>(cnt) / static_cast<double>(n);
    }
    return out;
}

/// Exact output distribution of the sampling algorithm itself, by
/// enumerating every branch combination and every outcome history.
inline std::map<std::string, double> sampler_exact_distribution(const ClusterCircuit &c, const StochasticRep &rep,
                                                                std::size_t max_combinations = 1u << 20) {
    c.validate();
    double combos = std::pow(static_cast<double>(rep.branches.size()), static_cast<double>(c.edges.size()));
    if (combos > static_cast<double>(max_combinations)) {
        throw std::invalid_argument("too many branch combinations to enumerate");
    }
    std::map<std::string, double> dist;
    std::vector<CylinderExtremum> state = c.inputs;
    std::vector<uint8_t> outcomes(c.n_qubits, 0);

    auto measure = [&](auto &self, std::size_t k, double weight) -> void {
        if (k == c.order.size()) {
            dist[detail::to_bitstring(outcomes)] += weight;
            return;
        }
        uint32_t v = c.order[k];
        Measurement m = c.plan[v].resolve(outcomes);
        for (uint8_t bit = 0; bit < 2; bit++) {
            double p = measure_prob(to_bloch(state[v]), m, bit);
            if (p <= 0) {
                continue;
            }
            outcomes[v] = bit;
            self(self, k + 1, weight * p);
        }
        outcomes[v] = 0;
    };
    auto gates = [&](auto &self, std::size_t e, double weight) -> void {
        if (e == c.edges.size()) {
            measure(measure, 0, weight);
            return;
        }
        auto [u, v] = c.edges[e];
        auto su = state[u];
        auto sv = state[v];
        for (std::size_t i = 0; i < rep.branches.size(); i++) {
            auto [a, b] = apply_branch(su, sv, rep, i);
            state[u] = a;
            state[v] = b;
            self(self, e + 1, weight * rep.branches[i].p);
        }
        state[u] = su;
        state[v] = sv;
    };
    gates(gates, 0, 1.0);
    return dist;
}

}  // namespace cylsim
