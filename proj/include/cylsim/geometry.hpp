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
#include <numbers>
#include <stdexcept>

namespace cylsim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Default tolerance for membership and positivity checks.
inline constexpr double kMembershipTol = 1e-9;
/// Default tolerance for reconstruction identities.
inline constexpr double kReconstructionTol = 1e-6;

/// Maps an angle into [0, 2pi).
inline double canonical_angle(double a) {
    if (!std::isfinite(a)) {
        throw std::invalid_argument("angle must be finite");
    }
    double r = std::fmod(a, kTwoPi);
    if (r < 0) {
        r += kTwoPi;
    }
    if (r >= kTwoPi) {
        r = 0;
    }
    return r;
}

/// A unit-trace single-qubit operator (I + xX + yY + zZ)/2, physical or not.
struct CylinderOperator {
    double x = 0;
    double y = 0;
    double z = 0;

    CylinderOperator() = default;
    CylinderOperator(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
            throw std::invalid_argument("Bloch coefficients must be finite");
        }
    }

    /// Transverse norm sqrt(x^2 + y^2).
    double radius() const {
        return std::hypot(x, y);
    }

    bool operator==(const CylinderOperator &) const = default;
};

/// A point on the top (pole = +1) or bottom (pole = -1) rim of Cyl(r).
struct CylinderExtremum {
    double r = 0;
    double theta = 0;
    int pole = +1;

    CylinderExtremum() = default;
    CylinderExtremum(double r_, double theta_, int pole_) : r(r_), theta(canonical_angle(theta_)), pole(pole_) {
        if (!(r >= 0) || !std::isfinite(r)) {
            throw std::invalid_argument("extremum radius must be finite and non-negative");
        }
        if (pole != 1 && pole != -1) {
            throw std::invalid_argument("extremum pole must be +1 or -1");
        }
    }

    bool operator==(const CylinderExtremum &) const = default;
};

enum class MeasurementKind { ZBasis, XYPlane };

/// Z-basis measurement, or a measurement of cos(alpha) X + sin(alpha) Y.
struct Measurement {
    MeasurementKind kind = MeasurementKind::ZBasis;
    double alpha = 0;

    static Measurement z_basis() {
        return {MeasurementKind::ZBasis, 0};
    }
    static Measurement xy_plane(double alpha) {
        return {MeasurementKind::XYPlane, canonical_angle(alpha)};
    }
};

inline CylinderOperator to_bloch(const CylinderExtremum &e) {
    return {e.r * std::cos(e.theta), e.r * std::sin(e.theta), static_cast<double>(e.pole)};
}

/// Removes the transverse (off-diagonal) component.
inline CylinderOperator dephase(const CylinderOperator &op) {
    return {0, 0, op.z};
}

/// The phasing map r*I + (1-r)*D_Z. Invertible for r > 0 by phase_map(., 1/r).
inline CylinderOperator phase_map(const CylinderOperator &op, double r) {
    if (!(r >= 0)) {
        throw std::invalid_argument("phasing parameter must be non-negative");
    }
    return {op.x * r, op.y * r, op.z};
}

inline bool in_cylinder(const CylinderOperator &op, double r, double tol = kMembershipTol) {
    return op.radius() <= r + tol && std::abs(op.z) <= 1 + tol;
}

/// Born-rule value of one outcome. Signed: non-dual operators can give
/// negative values. Outcome 0 is the +1 eigenvalue.
inline double measure_prob(const CylinderOperator &op, const Measurement &m, int outcome) {
    double s = outcome == 0 ? 1.0 : -1.0;
    if (m.kind == MeasurementKind::ZBasis) {
        return (1 + s * op.z) / 2;
    }
    return (1 + s * (op.x * std::cos(m.alpha) + op.y * std::sin(m.alpha))) / 2;
}

}  // namespace cylsim
