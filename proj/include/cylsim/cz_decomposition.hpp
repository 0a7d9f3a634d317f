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

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cylsim/geometry.hpp"
#include "cylsim/simplex.hpp"

namespace cylsim {

/// Coefficients c[i][j] of sigma_i (x) sigma_j / 4, Pauli order I, X, Y, Z.
/// Row index belongs to the first qubit.
struct PauliCoeffMatrix {
    std::array<std::array<double, 4>, 4> c{};

    static PauliCoeffMatrix product(const CylinderOperator &a, const CylinderOperator &b) {
        const std::array<double, 4> u{1, a.x, a.y, a.z};
        const std::array<double, 4> v{1, b.x, b.y, b.z};
        PauliCoeffMatrix m;
        for (int i = 0; i < 4; i++) {
            for (int j = 0; j < 4; j++) {
                m.c[i][j] = u[i] * v[j];
            }
        }
        return m;
    }

    double max_abs_diff(const PauliCoeffMatrix &other) const {
        double d = 0;
        for (int i = 0; i < 4; i++) {
            for (int j = 0; j < 4; j++) {
                d = std::max(d, std::abs(c[i][j] - other.c[i][j]));
            }
        }
        return d;
    }

    void add_scaled(const PauliCoeffMatrix &other, double w) {
        for (int i = 0; i < 4; i++) {
            for (int j = 0; j < 4; j++) {
                c[i][j] += w * other.c[i][j];
            }
        }
    }
};

/// The critical symmetric growth rate sqrt(1 / (sqrt(5) - 2)), the positive
/// root of 1 - 4/g^2 - 1/g^4 = 0.
inline double symmetric_growth() {
    return std::sqrt(1.0 / (std::sqrt(5.0) - 2.0));
}

namespace detail {
inline double radius_ratio(double r, double big_r) {
    if (r < 0 || big_r < 0) {
        throw std::invalid_argument("radii must be non-negative");
    }
    if (r == 0) {
        return 0;
    }
    if (big_r == 0) {
        return std::numeric_limits<double>::infinity();
    }
    return r / big_r;
}
}  // namespace detail

/// 1 - (fA + fB)^2 - fA^2 fB^2 with f = r/R. Non-negative exactly when the CZ
/// output on Cyl(rA) x Cyl(rB) is Cyl(RA), Cyl(RB)-separable.
inline double separability_slack(double ra, double rb, double big_ra, double big_rb) {
    double fa = detail::radius_ratio(ra, big_ra);
    double fb = detail::radius_ratio(rb, big_rb);
    if (std::isinf(fa) || std::isinf(fb)) {
        return -std::numeric_limits<double>::infinity();
    }
    return 1.0 - (fa + fb) * (fa + fb) - fa * fa * fb * fb;
}

inline bool separability_condition(double ra, double rb, double big_ra, double big_rb, double tol = 1e-12) {
    return separability_slack(ra, rb, big_ra, big_rb) >= -tol;
}

/// Pauli coefficients of CZ ([1, rA, 0, 1] (x) [1, rB, 0, 1]) CZ.
inline PauliCoeffMatrix cz_pauli_output(double ra, double rb) {
    PauliCoeffMatrix m;
    m.c[0] = {1, rb, 0, 1};
    m.c[1] = {ra, 0, 0, ra};
    m.c[2] = {0, 0, ra * rb, 0};
    m.c[3] = {1, rb, 0, 1};
    return m;
}

struct PptDeterminants {
    double inner = 0;
    double outer = 0;
};

/// Determinants of the two 2x2 blocks of the Hadamard-rotated partial
/// transpose. The outer block is the binding one for fA, fB >= 0.
inline PptDeterminants ppt_determinants(double fa, double fb) {
    return {1 - (fa - fb) * (fa - fb) - fa * fa * fb * fb, 1 - (fa + fb) * (fa + fb) - fa * fa * fb * fb};
}

/// One outcome of the stochastic CZ: Z-rotation offsets for the two outputs.
struct Branch {
    double p = 0;
    double dtheta_a = 0;
    double dtheta_b = 0;
};

/// CZ on cylinder extrema as radius growth plus a sampled pair of Z rotations.
struct StochasticRep {
    double growth = 1;
    std::vector<Branch> branches;
    /// Max-norm Pauli residual of the fiducial reconstruction at output radius 1.
    double residual = 0;
    int grid_size = 0;
};

class InfeasibleDecomposition : public std::runtime_error {
   public:
    InfeasibleDecomposition(const std::string &what, double residual)
        : std::runtime_error(what), residual_(residual) {
    }
    double residual() const {
        return residual_;
    }

   private:
    double residual_;
};

/// Target: Pauli coefficients of the CZ output scaled to unit output radii.
inline PauliCoeffMatrix scaled_cz_target(double fa, double fb) {
    return cz_pauli_output(fa, fb);
}

/// Result of the L-infinity fit over products of rim points (pole +1) on a
/// uniform angle grid.
struct RimFit {
    std::vector<Branch> branches;
    double residual = std::numeric_limits<double>::infinity();
};

inline PauliCoeffMatrix branch_mixture_unit(const std::vector<Branch> &branches) {
    PauliCoeffMatrix m;
    for (const auto &br : branches) {
        CylinderOperator a(std::cos(br.dtheta_a), std::sin(br.dtheta_a), 1);
        CylinderOperator b(std::cos(br.dtheta_b), std::sin(br.dtheta_b), 1);
        m.add_scaled(PauliCoeffMatrix::product(a, b), br.p);
    }
    return m;
}

/// Minimizes the max-norm residual to scaled_cz_target(fa, fb) over mixtures
/// of grid products. Only the eight transverse moments are free; the z
/// columns and rows match automatically because every candidate has z = 1.
inline RimFit fit_rim_mixture(double fa, double fb, int grid_size) {
    if (grid_size < 8) {
        throw std::invalid_argument("grid_size must be at least 8");
    }
    const std::size_t g = static_cast<std::size_t>(grid_size);
    const std::size_t k = g * g;
    std::vector<double> cs(g), sn(g);
    for (std::size_t i = 0; i < g; i++) {
        double th = kTwoPi * static_cast<double>(i) / static_cast<double>(g);
        cs[i] = std::cos(th);
        sn[i] = std::sin(th);
    }
    // Moments: xB, yB, xA, yA, xAxB, xAyB, yAxB, yAyB.
    const std::array<double, 8> target{fb, 0, fa, 0, 0, 0, 0, fa * fb};
    auto moment = [&](std::size_t ia, std::size_t ib, int which) {
        switch (which) {
            case 0: return cs[ib];
            case 1: return sn[ib];
            case 2: return cs[ia];
            case 3: return sn[ia];
            case 4: return cs[ia] * cs[ib];
            case 5: return cs[ia] * sn[ib];
            case 6: return sn[ia] * cs[ib];
            default: return sn[ia] * sn[ib];
        }
    };
    // Columns: k weights, residual bound t, 16 slacks.
    const std::size_t col_t = k;
    const std::size_t col_s = k + 1;
    LinearProgram lp(17, k + 17);
    for (std::size_t j = 0; j < k; j++) {
        lp.at(0, j) = 1;
    }
    lp.b[0] = 1;
    for (int q = 0; q < 8; q++) {
        std::size_t up = 1 + 2 * static_cast<std::size_t>(q);
        std::size_t dn = up + 1;
        for (std::size_t ia = 0; ia < g; ia++) {
            for (std::size_t ib = 0; ib < g; ib++) {
                double v = moment(ia, ib, q);
                lp.at(up, ia * g + ib) = v;
                lp.at(dn, ia * g + ib) = -v;
            }
        }
        lp.at(up, col_t) = -1;
        lp.at(dn, col_t) = -1;
        lp.at(up, col_s + 2 * static_cast<std::size_t>(q)) = 1;
        lp.at(dn, col_s + 2 * static_cast<std::size_t>(q) + 1) = 1;
        lp.b[up] = target[static_cast<std::size_t>(q)];
        lp.b[dn] = -target[static_cast<std::size_t>(q)];
    }
    lp.c[col_t] = 1;
    LpSolution sol = solve_lp(lp);
    RimFit fit;
    if (sol.status != LpStatus::Optimal) {
        return fit;
    }
    double mass = 0;
    for (std::size_t ia = 0; ia < g; ia++) {
        for (std::size_t ib = 0; ib < g; ib++) {
            double p = sol.x[ia * g + ib];
            if (p < 1e-12) {
                continue;
            }
            mass += p;
            fit.branches.push_back(
                {p, kTwoPi * static_cast<double>(ia) / static_cast<double>(g),
                 kTwoPi * static_cast<double>(ib) / static_cast<double>(g)});
        }
    }
    for (auto &br : fit.branches) {
        br.p /= mass;
    }
    fit.residual = branch_mixture_unit(fit.branches).max_abs_diff(scaled_cz_target(fa, fb));
    return fit;
}

/// Builds the stochastic representation for input/output radius ratio f.
/// growth is 1/f (infinite for f = 0, where the CZ acts trivially).
inline StochasticRep build_decomposition(double f, int grid_size = 64, double tol = kReconstructionTol) {
    if (!(f >= 0) || !(f < 1)) {
        throw std::invalid_argument("radius ratio must lie in [0, 1)");
    }
    StochasticRep rep;
    rep.grid_size = grid_size;
    if (f == 0) {
        rep.growth = std::numeric_limits<double>::infinity();
        rep.branches = {{1.0, 0.0, 0.0}};
        return rep;
    }
    rep.growth = 1.0 / f;
    RimFit fit = fit_rim_mixture(f, f, grid_size);
    if (!(fit.residual <= tol)) {
        throw InfeasibleDecomposition(
            "no rim decomposition within tolerance (residual " + std::to_string(fit.residual) + ")",
            fit.residual);
    }
    rep.branches = std::move(fit.branches);
    rep.residual = fit.residual;
    return rep;
}

/// The representation used by the sampler: growth lambda * (1 + margin).
inline StochasticRep build_for_growth(double growth, int grid_size = 64, double tol = kReconstructionTol) {
    if (!(growth > 1)) {
        throw std::invalid_argument("growth must exceed 1");
    }
    StochasticRep rep = build_decomposition(1.0 / growth, grid_size, tol);
    rep.growth = growth;
    return rep;
}

inline std::size_t select_branch(const StochasticRep &rep, double rnd) {
    double acc = 0;
    for (std::size_t i = 0; i < rep.branches.size(); i++) {
        acc += rep.branches[i].p;
        if (rnd < acc) {
            return i;
        }
    }
    return rep.branches.size() - 1;
}

/// Outputs of one branch. A pole -1 input is treated as X applied to a pole
/// +1 input; pushing that X through the CZ gives X on its own output and Z on
/// the partner output.
inline std::pair<CylinderExtremum, CylinderExtremum> apply_branch(
    const CylinderExtremum &ea, const CylinderExtremum &eb, const StochasticRep &rep, std::size_t index) {
    const Branch &br = rep.branches.at(index);
    const bool flip_a = ea.pole < 0;
    const bool flip_b = eb.pole < 0;
    double ta = (flip_a ? -ea.theta : ea.theta) + br.dtheta_a;
    double tb = (flip_b ? -eb.theta : eb.theta) + br.dtheta_b;
    int pa = 1;
    int pb = 1;
    if (flip_a) {
        ta = -ta;
        pa = -1;
        tb += std::numbers::pi;
    }
    if (flip_b) {
        tb = -tb;
        pb = -1;
        ta += std::numbers::pi;
    }
    double ra = ea.r == 0 ? 0.0 : ea.r * rep.growth;
    double rb = eb.r == 0 ? 0.0 : eb.r * rep.growth;
    return {CylinderExtremum(ra, ta, pa), CylinderExtremum(rb, tb, pb)};
}

inline std::pair<CylinderExtremum, CylinderExtremum> apply_stochastic(
    const CylinderExtremum &ea, const CylinderExtremum &eb, const StochasticRep &rep, double rnd) {
    return apply_branch(ea, eb, rep, select_branch(rep, rnd));
}

/// Branch-weighted Pauli coefficients of the stochastic outputs.
inline PauliCoeffMatrix branch_mixture(const CylinderExtremum &ea, const CylinderExtremum &eb, const StochasticRep &rep) {
    PauliCoeffMatrix m;
    for (std::size_t i = 0; i < rep.branches.size(); i++) {
        auto [oa, ob] = apply_branch(ea, eb, rep, i);
        m.add_scaled(PauliCoeffMatrix::product(to_bloch(oa), to_bloch(ob)), rep.branches[i].p);
    }
    return m;
}

}  // namespace cylsim
