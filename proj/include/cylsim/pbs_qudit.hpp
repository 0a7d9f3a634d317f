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
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cylsim/geometry.hpp"
#include "cylsim/oracle.hpp"

namespace cylsim {

/// A unit-trace operator on one qudit of dimension d = rows().
using QuditOperator = Eigen::MatrixXcd;

/// A vector unbiased to the computational basis: entries phases[j] / sqrt(d).
struct EquatorialVector {
    std::vector<Complex> phases;

    /// Entry 0 fixed to 1, entries 1..d-1 given by angles.
    static EquatorialVector from_angles(const std::vector<double> &angles) {
        EquatorialVector v;
        v.phases.push_back(1);
        for (double a : angles) {
            v.phases.push_back(std::polar(1.0, a));
        }
        return v;
    }

    Eigen::VectorXcd vector() const {
        Eigen::VectorXcd out(static_cast<Eigen::Index>(phases.size()));
        double norm = 1.0 / std::sqrt(static_cast<double>(phases.size()));
        for (std::size_t j = 0; j < phases.size(); j++) {
            out(static_cast<Eigen::Index>(j)) = phases[j] * norm;
        }
        return out;
    }
};

namespace detail {
inline void require_unit_trace(const QuditOperator &rho) {
    if (rho.rows() != rho.cols() || rho.rows() < 2) {
        throw std::invalid_argument("qudit operator must be square with d >= 2");
    }
    if (std::abs(rho.trace() - Complex(1)) > 1e-12) {
        throw std::invalid_argument("qudit operator must have unit trace");
    }
}

inline double expectation(const QuditOperator &rho, const Eigen::VectorXcd &v) {
    return (v.adjoint() * rho * v)(0, 0).real();
}

/// Calls f(v) for every (1, first, +-1, ..., +-1) / sqrt(d) with first given.
template <typename F>
void for_each_sign_vector(int d, Complex first, F &&f) {
    const std::size_t count = std::size_t{1} << (d - 2);
    Eigen::VectorXcd v(d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t mask = 0; mask < count; mask++) {
        v(0) = first * norm;
        v(1) = norm;
        for (int k = 2; k < d; k++) {
            v(k) = ((mask >> (k - 2)) & 1) ? -norm : norm;
        }
        f(v);
    }
}
}  // namespace detail

/// Phasing map on a qudit: off-diagonal entries scaled by r.
inline QuditOperator qudit_phase_map(const QuditOperator &rho, double r) {
    if (!(r >= 0)) {
        throw std::invalid_argument("phasing parameter must be non-negative");
    }
    QuditOperator out = rho * r;
    out.diagonal() = rho.diagonal();
    return out;
}

struct OffdiagGaps {
    /// |(rho01 + rho10) - (-1 + d / 2^(d-2) sum_v <v|rho|v>)|.
    double gap1 = 0;
    /// |2|rho01| - (-1 + d / 2^(d-2) sum_v <v~|rho|v~>)|, v~ carrying the phase of rho01.
    double gap2 = 0;
};

/// Evaluates both off-diagonal identities by enumerating the 2^(d-2) sign
/// vectors. The second identity presumes a Hermitian operator.
inline OffdiagGaps offdiag_identity_check(const QuditOperator &rho) {
    detail::require_unit_trace(rho);
    const int d = static_cast<int>(rho.rows());
    if (d > 12) {
        throw ResourceCapExceeded("sign-vector enumeration supports d <= 12");
    }
    const double scale = d / std::ldexp(1.0, d - 2);
    Complex sum1 = 0;
    detail::for_each_sign_vector(d, 1.0, [&](const Eigen::VectorXcd &v) { sum1 += (v.adjoint() * rho * v)(0, 0); });
    Complex lhs1 = rho(0, 1) + rho(1, 0);
    OffdiagGaps gaps;
    gaps.gap1 = std::abs(lhs1 - (-1.0 + scale * sum1));

    const double t = std::abs(rho(0, 1));
    const double omega = t > 0 ? std::arg(rho(0, 1)) : 0.0;
    Complex sum2 = 0;
    detail::for_each_sign_vector(d, std::polar(1.0, omega),
                                 [&](const Eigen::VectorXcd &v) { sum2 += (v.adjoint() * rho * v)(0, 0); });
    gaps.gap2 = std::abs(Complex(2 * t) - (-1.0 + scale * sum2));
    return gaps;
}

/// Minimum of tr(M rho) over the computational-basis projectors and the
/// equatorial projectors with phases on a grid of `grid` values per free
/// component. A value >= -tol means membership at that resolution.
inline double dual_membership(const QuditOperator &rho, int grid) {
    detail::require_unit_trace(rho);
    const int d = static_cast<int>(rho.rows());
    if (grid < 1) {
        throw std::invalid_argument("grid must be positive");
    }
    if (std::pow(static_cast<double>(grid), d - 1) > double(1 << 24)) {
        throw ResourceCapExceeded("equatorial grid too large");
    }
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < d; k++) {
        best = std::min(best, rho(k, k).real());
    }
    std::vector<int> idx(static_cast<std::size_t>(d - 1), 0);
    std::vector<double> angles(static_cast<std::size_t>(d - 1), 0.0);
    while (true) {
        for (std::size_t j = 0; j < idx.size(); j++) {
            angles[j] = kTwoPi * idx[j] / grid;
        }
        best = std::min(best, detail::expectation(rho, EquatorialVector::from_angles(angles).vector()));
        std::size_t j = 0;
        while (j < idx.size() && ++idx[j] == grid) {
            idx[j] = 0;
            j++;
        }
        if (j == idx.size()) {
            break;
        }
    }
    return best;
}

/// Basis strings are digit vectors, site 0 first; the tensor index places
/// site 0 in the most significant position.
using QuditString = std::vector<int>;

inline std::size_t qudit_index(const QuditString &s, int d) {
    std::size_t idx = 0;
    for (int x : s) {
        idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(x);
    }
    return idx;
}

inline QuditString qudit_string(std::size_t idx, int d, std::size_t n) {
    QuditString s(n);
    for (std::size_t j = n; j-- > 0;) {
        s[j] = static_cast<int>(idx % static_cast<std::size_t>(d));
        idx /= static_cast<std::size_t>(d);
    }
    return s;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// One site of a product term: |a><a| + z |x><y| + conj(z) |y><x|.
struct PhaseSiteTerm {
    int a = 0;
    int x = 0;
    int y = 0;
    Complex z = 0;
};

struct PhaseTerm {
    double weight = 0;
    std::vector<PhaseSiteTerm> sites;
};

/// Separable decomposition of |a><a| + W c |x><y| + W conj(c) |y><x| into
/// 8^(N-1) equally weighted products. Site j carries E_j = c^(1/N) |x_j><y_j|
/// rotated by exp(2 pi i v_j / 8), with v_N = -(v_1 + ... + v_(N-1)).
struct PhaseDecomposition {
    int d = 2;
    std::size_t n = 0;
    std::vector<PhaseTerm> terms;
};

inline Eigen::MatrixXcd site_operator(const PhaseSiteTerm &s, int d) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    m(s.a, s.a) += 1;
    m(s.x, s.y) += s.z;
    m(s.y, s.x) += std::conj(s.z);
    return m;
}

inline PhaseDecomposition phase_decompose(const QuditString &a, const QuditString &x, const QuditString &y, Complex c,
                                          double w, int d) {
    const std::size_t n = a.size();
    if (n < 1 || x.size() != n || y.size() != n) {
        throw std::invalid_argument("basis strings must share a non-zero length");
    }
    if (n > 6) {
        throw ResourceCapExceeded("phase decomposition supports N <= 6");
    }
    if (x == y) {
        throw std::invalid_argument("x and y must differ");
    }
    for (std::size_t j = 0; j < n; j++) {
        for (int v : {a[j], x[j], y[j]}) {
            if (v < 0 || v >= d) {
                throw std::invalid_argument("basis label out of range");
            }
        }
    }
    const double nn = static_cast<double>(n);
    const Complex root = std::pow(w, 1.0 / nn) * std::polar(std::pow(std::abs(c), 1.0 / nn), std::arg(c) / nn);
    PhaseDecomposition dec;
    dec.d = d;
    dec.n = n;
    std::size_t count = 1;
    for (std::size_t j = 1; j < n; j++) {
        count *= 8;
    }
    const double weight = 1.0 / static_cast<double>(count);
    for (std::size_t code = 0; code < count; code++) {
        PhaseTerm term;
        term.weight = weight;
        int total = 0;
        std::size_t rest = code;
        for (std::size_t j = 0; j < n; j++) {
            int v;
            if (j + 1 < n) {
                v = static_cast<int>(rest % 8);
                rest /= 8;
                total += v;
            } else {
                v = ((-total) % 8 + 8) % 8;
            }
            term.sites.push_back({a[j], x[j], y[j], root * std::polar(1.0, kTwoPi * v / 8)});
        }
        dec.terms.push_back(std::move(term));
    }
    return dec;
}

inline Eigen::MatrixXcd reconstruct(const PhaseDecomposition &dec) {
    const auto dim = static_cast<Eigen::Index>(std::pow(dec.d, static_cast<double>(dec.n)));
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto &term : dec.terms) {
        Eigen::MatrixXcd prod = Eigen::MatrixXcd::Ones(1, 1);
        for (const auto &s : term.sites) {
            prod = kron(prod, site_operator(s, dec.d));
        }
        total += term.weight * prod;
    }
    return total;
}

inline Eigen::MatrixXcd phase_target(const QuditString &a, const QuditString &x, const QuditString &y, Complex c,
                                     double w, int d) {
    const auto dim = static_cast<Eigen::Index>(std::pow(d, static_cast<double>(a.size())));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    auto ia = static_cast<Eigen::Index>(qudit_index(a, d));
    auto ix = static_cast<Eigen::Index>(qudit_index(x, d));
    auto iy = static_cast<Eigen::Index>(qudit_index(y, d));
    m(ia, ia) += 1;
    m(ix, iy) += w * c;
    m(iy, ix) += w * std::conj(c);
    return m;
}

/// Largest |average over v of exp(2 pi i / 8 * sum_j s_j v_j)| over all
/// non-constant patterns s in {-1, 0, 1}^N (the cross terms); expected 0.
inline double cross_term_audit(std::size_t n) {
    if (n < 2 || n > 6) {
        throw std::invalid_argument("audit supports 2 <= N <= 6");
    }
    std::size_t patterns = 1;
    std::size_t count = 1;
    for (std::size_t j = 0; j < n; j++) {
        patterns *= 3;
    }
    for (std::size_t j = 1; j < n; j++) {
        count *= 8;
    }
    double worst = 0;
    for (std::size_t p = 0; p < patterns; p++) {
        std::vector<int> s(n);
        std::size_t rest = p;
        for (auto &sj : s) {
            sj = static_cast<int>(rest % 3) - 1;
            rest /= 3;
        }
        if (std::all_of(s.begin(), s.end(), [&](int v) { return v == s[0]; })) {
            continue;
        }
        Complex acc = 0;
        for (std::size_t code = 0; code < count; code++) {
            int phase = 0;
            int total = 0;
            std::size_t r = code;
            for (std::size_t j = 0; j + 1 < n; j++) {
                int v = static_cast<int>(r % 8);
                r /= 8;
                total += v;
                phase += s[j] * v;
            }
            phase += s[n - 1] * (-total);
            acc += std::polar(1.0, kTwoPi * phase / 8);
        }
        worst = std::max(worst, std::abs(acc) / static_cast<double>(count));
    }
    return worst;
}

/// True when the diagonal phases split as a sum of single-site phases, i.e.
/// the gate is a product of local diagonal unitaries.
inline bool is_product_diagonal(const std::vector<Complex> &diag, int d, std::size_t n) {
    const Complex base = diag.at(0);
    for (std::size_t idx = 0; idx < diag.size(); idx++) {
        QuditString s = qudit_string(idx, d, n);
        Complex predicted = base;
        for (std::size_t j = 0; j < n; j++) {
            QuditString single(n, 0);
            single[j] = s[j];
            predicted *= diag[qudit_index(single, d)] / base;
        }
        if (std::abs(predicted - diag[idx]) > 1e-12) {
            return false;
        }
    }
    return true;
}

struct EstimateCReport {
    int d = 2;
    std::size_t n = 0;
    /// Largest grid eta for which every local factor passed (0 if none).
    double eta_bound = 0;
    int eta_grid = 0;
    int meas_grid = 0;
    /// Largest number of off-diagonal pairs seen over the input family.
    std::size_t max_pairs = 0;
    bool product_gate = false;
};

/// Lower bound on the disentangling constant of a diagonal gate, certified
/// for the phase-cancellation construction. Inputs are the extrema
/// |a><a| + offdiag(|u><u|) with u the uniform equatorial vector; other
/// equatorial u differ by local diagonal unitaries, which commute with the
/// gate and the dephasing and preserve the local dual cones. Each output is
/// dephased (off-diagonals times eta^(#sites where row and column labels
/// differ)), split into pair terms, and every local factor of every phase
/// product, normalized by its trace, must pass dual_membership.
inline EstimateCReport estimate_c(const std::vector<Complex> &diag, int d, std::size_t n, int eta_grid,
                                  int meas_grid, double tol = kMembershipTol) {
    if (d < 2 || d > 4 || n < 1 || n > 3) {
        throw ResourceCapExceeded("estimate_c supports d <= 4 and N <= 3");
    }
    const std::size_t dim = static_cast<std::size_t>(std::pow(d, static_cast<double>(n)));
    if (diag.size() != dim) {
        throw std::invalid_argument("gate diagonal has the wrong length");
    }
    for (const auto &z : diag) {
        if (std::abs(std::abs(z) - 1) > 1e-12) {
            throw std::invalid_argument("gate diagonal entries must have unit modulus");
        }
    }
    EstimateCReport rep;
    rep.d = d;
    rep.n = n;
    rep.eta_grid = eta_grid;
    rep.meas_grid = meas_grid;
    if (is_product_diagonal(diag, d, n)) {
        rep.product_gate = true;
        rep.eta_bound = 1;
        return rep;
    }

    std::map<std::tuple<int, int, int, double, double>, bool> cache;
    auto factor_ok = [&](const PhaseSiteTerm &s) {
        auto key = std::make_tuple(s.a, s.x, s.y, s.z.real(), s.z.imag());
        auto it = cache.find(key);
        if (it != cache.end()) {
            return it->second;
        }
        Eigen::MatrixXcd m = site_operator(s, d);
        Complex tau = m.trace();
        bool ok = tau.real() > tol;
        if (ok) {
            ok = dual_membership(m / tau.real(), meas_grid) >= -tol;
        }
        cache.emplace(key, ok);
        return ok;
    };

    auto passes = [&](double eta) {
        for (std::size_t input = 0; input < dim; input++) {
            QuditString a = qudit_string(input, d, n);
            // Product input: entry (m, n) is 1 if m = n = a, 1/d^k if m and n
            // differ on exactly k sites and agree with a elsewhere.
            std::vector<std::tuple<std::size_t, std::size_t, Complex>> pairs;
            for (std::size_t row = 0; row < dim; row++) {
                QuditString ms = qudit_string(row, d, n);
                for (std::size_t col = row + 1; col < dim; col++) {
                    QuditString ns = qudit_string(col, d, n);
                    int differ = 0;
                    bool valid = true;
                    for (std::size_t j = 0; j < n; j++) {
                        if (ms[j] != ns[j]) {
                            differ++;
                        } else if (ms[j] != a[j]) {
                            valid = false;
                        }
                    }
                    if (!valid) {
                        continue;
                    }
                    Complex entry = std::pow(1.0 / d, differ) * diag[row] * std::conj(diag[col]) * std::pow(eta, differ);
                    if (std::abs(entry) > 1e-15) {
                        pairs.emplace_back(row, col, entry);
                    }
                }
            }
            rep.max_pairs = std::max(rep.max_pairs, pairs.size());
            const double w = static_cast<double>(pairs.size());
            for (const auto &[row, col, entry] : pairs) {
                PhaseDecomposition dec =
                    phase_decompose(a, qudit_string(row, d, n), qudit_string(col, d, n), entry, w, d);
                for (const auto &term : dec.terms) {
                    for (const auto &s : term.sites) {
                        if (!factor_ok(s)) {
                            return false;
                        }
                    }
                }
            }
        }
        return true;
    };

    for (int k = 1; k <= eta_grid; k++) {
        double eta = static_cast<double>(k) / eta_grid;
        if (!passes(eta)) {
            break;
        }
        rep.eta_bound = eta;
    }
    return rep;
}

/// Controlled phase sum_jk omega^(jk) |jk><jk| on two qudits.
inline std::vector<Complex> controlled_phase_diagonal(int d) {
    std::vector<Complex> diag;
    for (int j = 0; j < d; j++) {
        for (int k = 0; k < d; k++) {
            diag.push_back(std::polar(1.0, kTwoPi * j * k / d));
        }
    }
    return diag;
}

}  // namespace cylsim
