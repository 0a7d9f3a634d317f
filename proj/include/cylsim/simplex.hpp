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
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cylsim {

/// Dense two-phase tableau simplex for
///     minimize c.x  subject to  A x = b,  x >= 0.
/// Meant for small row counts (tens) and a few thousand columns.
struct LinearProgram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;  // row-major rows x cols
    std::vector<double> b;
    std::vector<double> c;

    LinearProgram(std::size_t rows_, std::size_t cols_)
        : rows(rows_), cols(cols_), a(rows_ * cols_, 0.0), b(rows_, 0.0), c(cols_, 0.0) {
    }

    double &at(std::size_t r, std::size_t col) {
        return a[r * cols + col];
    }
    double at(std::size_t r, std::size_t col) const {
        return a[r * cols + col];
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = std::numeric_limits<double>::infinity();
};

namespace detail {

class Tableau {
   public:
    Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), width_(n + 1), t_((m + 1) * (n + 1), 0.0), basis_(m) {
    }

    double &at(std::size_t r, std::size_t c) {
        return t_[r * width_ + c];
    }
    double &rhs(std::size_t r) {
        return t_[r * width_ + n_];
    }
    double &obj(std::size_t c) {
        return t_[m_ * width_ + c];
    }
    std::vector<std::size_t> &basis() {
        return basis_;
    }

    void pivot(std::size_t pr, std::size_t pc) {
        double inv = 1.0 / at(pr, pc);
        double *prow = &t_[pr * width_];
        for (std::size_t c = 0; c < width_; c++) {
            prow[c] *= inv;
        }
        prow[pc] = 1.0;
        for (std::size_t r = 0; r <= m_; r++) {
            if (r == pr) {
                continue;
            }
            double *row = &t_[r * width_];
            double f = row[pc];
            if (f == 0) {
                continue;
            }
            for (std::size_t c = 0; c < width_; c++) {
                row[c] -= f * prow[c];
            }
            row[pc] = 0.0;
        }
        basis_[pr] = pc;
    }

    /// Runs simplex iterations minimizing the objective row. Columns with
    /// allowed[c] == false never enter. Returns false when unbounded.
    LpStatus optimize(const std::vector<bool> &allowed, double eps, std::size_t max_iter) {
        std::size_t stalled = 0;
        double last = obj_value();
        for (std::size_t iter = 0; iter < max_iter; iter++) {
            bool bland = stalled > 50;
            std::size_t pc = n_;
            double best = -eps;
            for (std::size_t c = 0; c < n_; c++) {
                if (!allowed[c]) {
                    continue;
                }
                double rc = obj(c);
                if (rc < best) {
                    pc = c;
                    best = rc;
                    if (bland) {
                        break;
                    }
                }
            }
            if (pc == n_) {
                return LpStatus::Optimal;
            }
            std::size_t pr = m_;
            double ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; r++) {
                double v = at(r, pc);
                if (v > eps) {
                    double q = rhs(r) / v;
                    if (q < ratio - 1e-15 || (q <= ratio + 1e-15 && pr < m_ && basis_[r] < basis_[pr])) {
                        ratio = q;
                        pr = r;
                    }
                }
            }
            if (pr == m_) {
                return LpStatus::Unbounded;
            }
            pivot(pr, pc);
            double now = obj_value();
            stalled = now < last - 1e-14 ? 0 : stalled + 1;
            last = now;
        }
        return LpStatus::IterationLimit;
    }

    double obj_value() {
        return -t_[m_ * width_ + n_];
    }

   private:
    std::size_t m_, n_, width_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram &lp, double eps = 1e-11, std::size_t max_iter = 200000) {
    const std::size_t m = lp.rows;
    const std::size_t n = lp.cols;
    if (lp.a.size() != m * n || lp.b.size() != m || lp.c.size() != n) {
        throw std::invalid_argument("linear program dimensions are inconsistent");
    }
    // Columns: n structural, then m artificials.
    detail::Tableau tab(m, n + m);
    for (std::size_t r = 0; r < m; r++) {
        double sign = lp.b[r] < 0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; c++) {
            tab.at(r, c) = sign * lp.at(r, c);
        }
        tab.at(r, n + r) = 1.0;
        tab.rhs(r) = sign * lp.b[r];
        tab.basis()[r] = n + r;
    }

    // Phase 1: minimize the sum of artificials.
    for (std::size_t c = 0; c <= n + m; c++) {
        double s = 0;
        if (c < n || c == n + m) {
            for (std::size_t r = 0; r < m; r++) {
                s += c == n + m ? tab.rhs(r) : tab.at(r, c);
            }
        }
        tab.obj(c) = -s;
    }
    std::vector<bool> allowed(n + m, true);
    LpStatus st = tab.optimize(allowed, eps, max_iter);
    LpSolution out;
    if (st == LpStatus::IterationLimit) {
        out.status = st;
        return out;
    }
    double infeas = tab.obj_value();
    double scale = 1.0;
    for (double v : lp.b) {
        scale = std::max(scale, std::abs(v));
    }
    if (infeas > 1e-9 * scale) {
        out.status = LpStatus::Infeasible;
        return out;
    }

    // Drive remaining artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; r++) {
        if (tab.basis()[r] < n) {
            continue;
        }
        for (std::size_t c = 0; c < n; c++) {
            if (std::abs(tab.at(r, c)) > 1e-9) {
                tab.pivot(r, c);
                break;
            }
        }
    }
    for (std::size_t c = n; c < n + m; c++) {
        allowed[c] = false;
    }

    // Phase 2 objective row: reduced costs of c relative to current basis.
    for (std::size_t c = 0; c <= n + m; c++) {
        tab.obj(c) = c < n ? lp.c[c] : 0.0;
    }
    for (std::size_t r = 0; r < m; r++) {
        std::size_t bc = tab.basis()[r];
        double cb = bc < n ? lp.c[bc] : 0.0;
        if (cb == 0) {
            continue;
        }
        for (std::size_t c = 0; c <= n + m; c++) {
            double v = c == n + m ? tab.rhs(r) : tab.at(r, c);
            tab.obj(c) -= cb * v;
        }
    }
    st = tab.optimize(allowed, eps, max_iter);
    out.status = st;
    if (st != LpStatus::Optimal) {
        return out;
    }
    out.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; r++) {
        std::size_t bc = tab.basis()[r];
        if (bc < n) {
            out.x[bc] = std::max(0.0, tab.rhs(r));
        }
    }
    out.objective = 0;
    for (std::size_t c = 0; c < n; c++) {
        out.objective += lp.c[c] * out.x[c];
    }
    return out;
}

}  // namespace cylsim
