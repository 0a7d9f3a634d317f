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
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cylsim/geometry.hpp"

namespace cylsim {

/// Site-percolation threshold of the square lattice.
inline constexpr double kPercolationThreshold = 0.5927;

/// Outcome probabilities of the X measurement on ancilla 1 after
/// CZ(|phi1>, |phi2>), with |phi> = cos(phi/2)|0> + sin(phi/2)|1>.
/// Outcome 1 (the -1 eigenvalue) steers the partner towards |+>.
struct BranchProbs {
    double p1 = 0;
    double p0 = 0;
};

inline BranchProbs branch_probs(double phi1, double phi2) {
    double p1 = (1 - std::sin(phi1) * std::cos(phi2)) / 2;
    return {p1, 1 - p1};
}

/// Partner angle after outcome 0: a Y rotation towards |0>.
inline double failure_angle(double phi1, double phi2) {
    double c = std::cos(phi1 / 2);
    double s = std::sin(phi1 / 2);
    return canonical_angle(2 * std::atan2((c - s) * std::sin(phi2 / 2), (c + s) * std::cos(phi2 / 2)));
}

/// Partner angle after outcome 1; equals pi/2 (the |+> state) whenever
/// phi1 + phi2 = pi/2.
inline double success_angle(double phi1, double phi2) {
    double c = std::cos(phi1 / 2);
    double s = std::sin(phi1 / 2);
    return canonical_angle(2 * std::atan2((c + s) * std::sin(phi2 / 2), (c - s) * std::cos(phi2 / 2)));
}

/// A chain of ancillas steering one lattice qubit. angles[k] is the
/// preparation angle of ancilla k+1; the lattice qubit angle is derived
/// from the chain constraint after the last failure.
struct ChainProtocol {
    std::vector<double> angles;
    /// Allowed violation of each consecutive-sum constraint (radians).
    double constraint_tol = 1e-9;

    /// Ancilla angles completed by chain constraints from the first angle.
    static ChainProtocol derived(double phi1, std::size_t n_ancilla) {
        if (n_ancilla < 1) {
            throw std::invalid_argument("a chain needs at least one ancilla");
        }
        ChainProtocol p;
        p.angles.push_back(phi1);
        double carrier = phi1;
        double partner = std::numbers::pi / 2 - carrier;
        for (std::size_t k = 1; k < n_ancilla; k++) {
            p.angles.push_back(canonical_angle(partner));
            carrier = failure_angle(carrier, partner);
            partner = std::numbers::pi / 2 - carrier;
        }
        return p;
    }
};

/// Per-step quantities of a chain: the carrier angle measured at step k and
/// its partner angle.
struct ChainTrace {
    std::vector<double> carrier;
    std::vector<double> partner;
    std::vector<double> success;
    double lattice_angle = 0;
};

class ConstraintViolation : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

inline double angle_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

inline ChainTrace trace_chain(const ChainProtocol &p) {
    if (p.angles.empty()) {
        throw std::invalid_argument("a chain needs at least one ancilla");
    }
    ChainTrace t;
    double carrier = p.angles[0];
    for (std::size_t k = 0; k < p.angles.size(); k++) {
        double partner;
        if (k + 1 < p.angles.size()) {
            partner = p.angles[k + 1];
            if (angle_distance(carrier + partner, std::numbers::pi / 2) > p.constraint_tol) {
                throw ConstraintViolation("chain constraint violated at step " + std::to_string(k + 1));
            }
        } else {
            partner = canonical_angle(std::numbers::pi / 2 - carrier);
            t.lattice_angle = partner;
        }
        t.carrier.push_back(carrier);
        t.partner.push_back(partner);
        t.success.push_back(branch_probs(carrier, partner).p1);
        carrier = failure_angle(carrier, partner);
    }
    return t;
}

/// Probability that some step of the chain succeeds.
inline double site_success_prob(const ChainProtocol &p) {
    ChainTrace t = trace_chain(p);
    double total = 0;
    double still_failing = 1;
    for (double s : t.success) {
        total += still_failing * s;
        still_failing *= 1 - s;
    }
    return total;
}

/// Largest |sin phi| over the ancilla preparation angles.
inline double chain_r_max(const ChainProtocol &p) {
    double r = 0;
    for (double a : p.angles) {
        r = std::max(r, std::abs(std::sin(a)));
    }
    return r;
}

inline bool percolation_verdict(double p_site) {
    return p_site > kPercolationThreshold;
}

struct ChainOptimum {
    ChainProtocol protocol;
    double p_site = 0;
    double r_max = 0;
    double lattice_angle = 0;
    bool feasible = false;
};

/// Maximizes the site probability over the free first angle (later angles
/// follow from the chain constraints) subject to |sin phi_k| <= r_cap for
/// every ancilla: a grid over (0, 2 pi) followed by golden-section
/// refinement inside the best feasible grid cell.
inline ChainOptimum optimize_angles(std::size_t n_ancilla, double r_cap, int grid = 200) {
    if (n_ancilla < 1 || n_ancilla > 5) {
        throw std::invalid_argument("n_ancilla must be between 1 and 5");
    }
    auto evaluate = [&](double phi1) {
        ChainProtocol p = ChainProtocol::derived(phi1, n_ancilla);
        if (chain_r_max(p) > r_cap) {
            return -1.0;
        }
        return site_success_prob(p);
    };
    ChainOptimum best;
    double best_phi = 0;
    double best_val = -1;
    const double step = kTwoPi / grid;
    // Also probe the exact zeros of sin to cover r_cap = 0.
    std::vector<double> probes;
    for (int i = 1; i < grid; i++) {
        probes.push_back(step * i);
    }
    probes.push_back(std::numbers::pi);
    for (double phi : probes) {
        double v = evaluate(phi);
        if (v > best_val) {
            best_val = v;
            best_phi = phi;
        }
    }
    if (best_val < 0) {
        return best;
    }
    double lo = std::max(1e-12, best_phi - step);
    double hi = std::min(kTwoPi - 1e-12, best_phi + step);
    const double golden = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200 && hi - lo > 1e-13; it++) {
        double m1 = hi - golden * (hi - lo);
        double m2 = lo + golden * (hi - lo);
        if (evaluate(m1) >= evaluate(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    double refined = (lo + hi) / 2;
    if (evaluate(refined) > best_val) {
        best_phi = refined;
        best_val = evaluate(refined);
    }
    best.protocol = ChainProtocol::derived(best_phi, n_ancilla);
    best.p_site = best_val;
    best.r_max = chain_r_max(best.protocol);
    best.lattice_angle = trace_chain(best.protocol).lattice_angle;
    best.feasible = true;
    return best;
}

/// Monte-Carlo run of the chain on explicit two-qubit state vectors: each
/// step applies CZ to (carrier, fresh partner), samples the X outcome of the
/// carrier by the Born rule, and keeps the normalized partner state.
inline double simulate_chain(const ChainProtocol &p, uint64_t trials, uint64_t seed) {
    ChainTrace t = trace_chain(p);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    uint64_t successes = 0;
    for (uint64_t trial = 0; trial < trials; trial++) {
        Eigen::Vector2d carrier(std::cos(t.carrier[0] / 2), std::sin(t.carrier[0] / 2));
        for (std::size_t k = 0; k < t.partner.size(); k++) {
            Eigen::Vector2d partner(std::cos(t.partner[k] / 2), std::sin(t.partner[k] / 2));
            // Amplitudes indexed by (carrier bit, partner bit) after CZ.
            Eigen::Matrix2d amp = carrier * partner.transpose();
            amp(1, 1) = -amp(1, 1);
            // Project the carrier onto |+> (outcome 0) or |-> (outcome 1).
            Eigen::Vector2d plus = (amp.row(0) + amp.row(1)).transpose() / std::sqrt(2.0);
            Eigen::Vector2d minus = (amp.row(0) - amp.row(1)).transpose() / std::sqrt(2.0);
            double p1 = minus.squaredNorm();
            if (unif(rng) < p1) {
                successes++;
                break;
            }
            carrier = plus / plus.norm();
        }
    }
    return static_cast<double>(successes) / static_cast<double>(trials);
}

}  // namespace cylsim
