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
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cylsim/circuit.hpp"
#include "cylsim/cz_decomposition.hpp"
#include "cylsim/geometry.hpp"
#include "cylsim/oracle.hpp"

namespace cylsim {

enum class BlockMode { Plain, LambdaGrown };

inline const char *block_mode_name(BlockMode m) {
    return m == BlockMode::Plain ? "plain" : "lambda";
}

/// A rectangular piece of the square lattice. ext_counts[i] is the number of
/// lattice CZs leaving site i (row-major); in LambdaGrown mode site i gets
/// radius r * lambda^ext_counts[i].
struct BlockSpec {
    int height = 0;
    int width = 0;
    std::vector<int> ext_counts;
    BlockMode mode = BlockMode::Plain;

    /// External counts as embedded in the infinite square lattice.
    static BlockSpec rectangle(int height, int width, BlockMode mode) {
        BlockSpec b;
        b.height = height;
        b.width = width;
        b.mode = mode;
        for (int i = 0; i < height; i++) {
            for (int j = 0; j < width; j++) {
                int internal = (i > 0) + (i + 1 < height) + (j > 0) + (j + 1 < width);
                b.ext_counts.push_back(4 - internal);
            }
        }
        b.validate();
        return b;
    }

    BlockSpec with_mode(BlockMode m) const {
        BlockSpec b = *this;
        b.mode = m;
        return b;
    }

    std::size_t size() const {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }

    std::string label() const {
        return std::to_string(height) + "x" + std::to_string(width);
    }

    void validate() const {
        if (height < 1 || width < 1 || height * width < 2) {
            throw std::invalid_argument("block must contain at least two sites");
        }
        if (ext_counts.size() != size()) {
            throw std::invalid_argument("ext_counts must have one entry per site");
        }
        for (int e : ext_counts) {
            if (e < 0) {
                throw std::invalid_argument("ext_counts must be non-negative");
            }
        }
    }

    std::vector<double> radii(double r) const {
        if (!(r >= 0)) {
            throw std::invalid_argument("block radius must be non-negative");
        }
        std::vector<double> out(size(), r);
        if (mode == BlockMode::LambdaGrown) {
            const double lam = symmetric_growth();
            for (std::size_t i = 0; i < out.size(); i++) {
                out[i] = r * std::pow(lam, ext_counts[i]);
            }
        }
        return out;
    }

    std::vector<std::pair<uint32_t, uint32_t>> edges() const {
        return grid_circuit(static_cast<std::size_t>(height), static_cast<std::size_t>(width), 0,
                            MeasurementRule::z_basis())
            .edges;
    }
};

/// Input angles per site (row-major), all poles +1.
struct BlockAssignment {
    std::vector<double> theta;
};

namespace detail {
inline void check_assignment(const BlockSpec &b, const BlockAssignment &a) {
    b.validate();
    if (a.theta.size() != b.size()) {
        throw std::invalid_argument("assignment must have one angle per site");
    }
}

inline double block_scale(std::size_t n) {
    return std::ldexp(1.0, -static_cast<int>(n));
}
}  // namespace detail

/// Probability of the all-(I - X)/2 outcome, by building the block operator
/// as a dense matrix and contracting every qubit.
inline double block_prob_dense(const BlockSpec &b, double r, const BlockAssignment &a) {
    detail::check_assignment(b, a);
    detail::check_dense_cap(b.size());
    auto radii = b.radii(r);
    ClusterCircuit c = grid_circuit(static_cast<std::size_t>(b.height), static_cast<std::size_t>(b.width), 0,
                                    MeasurementRule::z_basis());
    for (std::size_t i = 0; i < b.size(); i++) {
        c.inputs[i] = CylinderExtremum(radii[i], a.theta[i], +1);
    }
    DenseMatrix m = dense_output(c).entries;
    const Eigen::Matrix2cd minus_x = measurement_projector(Measurement::xy_plane(0), 1);
    for (std::size_t q = 0; q < b.size(); q++) {
        m = contract_qubit(m, 0, minus_x);
    }
    return m(0, 0).real();
}

/// (1 - r' cos tA - r' cos tB + r'^2 sin tA sin tB): four times the 1x2
/// block probability.
inline double two_block_formula(double rp, double theta_a, double theta_b) {
    return 1 - rp * std::cos(theta_a) - rp * std::cos(theta_b) + rp * rp * std::sin(theta_a) * std::sin(theta_b);
}

/// The block probability as a trigonometric polynomial
/// 2^n p(theta) = sum_k coeff[k] exp(i k . theta), k in {-1, 0, 1}^n.
/// Index digit i (base 3, site 0 most significant) is 0 for k_i = 0, 1 for
/// k_i = -1 and 2 for k_i = +1.
struct BlockFourier {
    std::size_t n = 0;
    std::vector<Complex> coeff;
    /// sum_k |coeff[k]| |k|_1^2, a bound on the Hessian in any direction.
    double curvature_bound = 0;
};

inline BlockFourier block_fourier(const BlockSpec &b, double r) {
    b.validate();
    if (b.size() > 16) {
        throw ResourceCapExceeded("Fourier expansion supports at most 16 sites");
    }
    const std::size_t n = b.size();
    auto radii = b.radii(r);
    std::vector<std::vector<std::size_t>> lower(n);
    for (auto [u, v] : b.edges()) {
        lower[std::max(u, v)].push_back(std::min(u, v));
    }
    BlockFourier f;
    f.n = n;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; i++) {
        total *= 3;
    }
    f.coeff.assign(total, 0);
    std::vector<int> s(n, 0), t(n, 0);
    auto rec = [&](auto &self, std::size_t i, std::size_t index, double weight, int parity, int l1) -> void {
        if (i == n) {
            double v = parity ? -weight : weight;
            f.coeff[index] = v;
            f.curvature_bound += std::abs(v) * l1 * l1;
            return;
        }
        for (int d = 0; d < 3; d++) {
            s[i] = d == 2;
            t[i] = d == 1;
            int p = parity;
            for (auto j : lower[i]) {
                p ^= (s[i] & s[j]) ^ (t[i] & t[j]);
            }
            double w = d == 0 ? weight : weight * (-radii[i] / 2);
            self(self, i + 1, index * 3 + static_cast<std::size_t>(d), w, p, l1 + (d != 0));
        }
        s[i] = t[i] = 0;
    };
    rec(rec, 0, 0, 1.0, 0, 0);
    return f;
}

/// Evaluates the Fourier form at one assignment (returns the probability).
inline double block_prob_fourier(const BlockFourier &f, const std::vector<double> &theta) {
    if (theta.size() != f.n) {
        throw std::invalid_argument("assignment size does not match the block");
    }
    std::vector<Complex> cur = f.coeff;
    std::size_t len = cur.size();
    for (std::size_t i = 0; i < f.n; i++) {
        std::size_t slice = len / 3;
        Complex em = std::polar(1.0, -theta[i]);
        Complex ep = std::polar(1.0, theta[i]);
        for (std::size_t x = 0; x < slice; x++) {
            cur[x] = cur[x] + em * cur[slice + x] + ep * cur[2 * slice + x];
        }
        len = slice;
    }
    return cur[0].real() * detail::block_scale(f.n);
}

/// Exact probability by a site-by-site transfer sweep along the longer side.
/// The frontier holds one {(0,0), (0,1), (1,0)} label per column, so the
/// bond dimension is 3^W for W = min(height, width).
class BlockContraction {
   public:
    static constexpr int kMaxWidth = 8;

    explicit BlockContraction(const BlockSpec &b) : block_(b) {
        b.validate();
        transposed_ = b.width > b.height;
        rows_ = transposed_ ? b.width : b.height;
        cols_ = transposed_ ? b.height : b.width;
        if (cols_ > kMaxWidth) {
            throw ResourceCapExceeded("contraction width " + std::to_string(cols_) + " exceeds " +
                                      std::to_string(kMaxWidth));
        }
        states_ = 1;
        for (int j = 0; j < cols_; j++) {
            pow3_.push_back(states_);
            states_ *= 3;
        }
        vec_.resize(states_);
        next_.resize(states_);
    }

    /// 2^n times the block probability for per-site radii and angles.
    double scaled(const std::vector<double> &radii, const std::vector<double> &theta) {
        std::fill(vec_.begin(), vec_.end(), Complex(0));
        vec_[0] = 1;
        for (int i = 0; i < rows_; i++) {
            for (int j = 0; j < cols_; j++) {
                std::size_t site = transposed_ ? static_cast<std::size_t>(j * block_.width + i)
                                               : static_cast<std::size_t>(i * block_.width + j);
                const std::array<Complex, 3> w{1.0, -radii[site] / 2 * std::polar(1.0, -theta[site]),
                                               -radii[site] / 2 * std::polar(1.0, theta[site])};
                step(j, w);
            }
        }
        Complex total = 0;
        for (auto &v : vec_) {
            total += v;
        }
        return total.real();
    }

   private:
    void step(int j, const std::array<Complex, 3> &w) {
        std::fill(next_.begin(), next_.end(), Complex(0));
        const std::size_t pj = pow3_[static_cast<std::size_t>(j)];
        for (std::size_t idx = 0; idx < states_; idx++) {
            const Complex v = vec_[idx];
            if (v == Complex(0)) {
                continue;
            }
            const std::size_t up = (idx / pj) % 3;
            const std::size_t left = j > 0 ? (idx / pow3_[static_cast<std::size_t>(j - 1)]) % 3 : 0;
            const std::size_t base = idx - up * pj;
            for (std::size_t c = 0; c < 3; c++) {
                // Labels couple with sign -1 exactly when equal and non-zero.
                int flips = (c != 0 && c == up) + (c != 0 && c == left);
                Complex f = (flips & 1) ? -w[c] : w[c];
                next_[base + c * pj] += v * f;
            }
        }
        std::swap(vec_, next_);
    }

    BlockSpec block_;
    bool transposed_ = false;
    int rows_ = 0;
    int cols_ = 0;
    std::size_t states_ = 0;
    std::vector<std::size_t> pow3_;
    std::vector<Complex> vec_;
    std::vector<Complex> next_;
};

inline double block_prob_contraction(const BlockSpec &b, double r, const BlockAssignment &a) {
    detail::check_assignment(b, a);
    BlockContraction engine(b);
    return engine.scaled(b.radii(r), a.theta) * detail::block_scale(b.size());
}

/// Result of scanning the uniform angle grid {2 pi j / grid}^n.
struct GridScan {
    int grid = 0;
    /// Smallest 2^n p over grid points, and where it occurs.
    double min_value = std::numeric_limits<double>::infinity();
    std::vector<double> argmin;
    /// Smallest certified value over grid cells: 2^n p(g) - h |grad|_1 - H h^2 / 2
    /// with h = pi / grid; non-negative means p >= 0 on the whole torus.
    double min_certified = std::numeric_limits<double>::infinity();
};

/// Evaluates the Fourier form on every grid point by contracting one site
/// at a time (with gradients when certifying).
inline GridScan scan_fourier_grid(const BlockFourier &f, int grid, bool certify) {
    if (grid < 1) {
        throw std::invalid_argument("grid must be positive");
    }
    const std::size_t n = f.n;
    const double h = std::numbers::pi / grid;
    const double curvature = 0.5 * f.curvature_bound * h * h;
    const std::size_t ncomp_max = certify ? n + 1 : 1;
    // levels[l] holds (value, d/dtheta_0, ..., d/dtheta_{l-1}) tensors of size 3^(n-l).
    std::vector<std::vector<Complex>> levels(n + 1);
    std::vector<std::size_t> len(n + 1);
    len[0] = f.coeff.size();
    for (std::size_t l = 1; l <= n; l++) {
        len[l] = len[l - 1] / 3;
    }
    for (std::size_t l = 0; l <= n; l++) {
        std::size_t ncomp = certify ? l + 1 : 1;
        levels[l].assign(ncomp * len[l], 0);
    }
    std::copy(f.coeff.begin(), f.coeff.end(), levels[0].begin());
    (void)ncomp_max;

    std::vector<Complex> phase(static_cast<std::size_t>(grid));
    for (int g = 0; g < grid; g++) {
        phase[static_cast<std::size_t>(g)] = std::polar(1.0, kTwoPi * g / grid);
    }
    GridScan scan;
    scan.grid = grid;
    std::vector<int> idx(n, 0);
    const Complex i_unit(0, 1);

    auto rec = [&](auto &self, std::size_t l) -> void {
        if (l == n) {
            const auto &leaf = levels[n];
            double value = leaf[0].real();
            if (value < scan.min_value) {
                scan.min_value = value;
                scan.argmin.resize(n);
                for (std::size_t i = 0; i < n; i++) {
                    scan.argmin[i] = kTwoPi * idx[i] / grid;
                }
            }
            if (certify) {
                double g1 = 0;
                for (std::size_t j = 0; j < n; j++) {
                    g1 += std::abs(leaf[1 + j].real());
                }
                scan.min_certified = std::min(scan.min_certified, value - h * g1 - curvature);
            }
            return;
        }
        const auto &src = levels[l];
        auto &dst = levels[l + 1];
        const std::size_t slice = len[l + 1];
        const std::size_t src_comp = certify ? l + 1 : 1;
        for (int g = 0; g < grid; g++) {
            idx[l] = g;
            const Complex ep = phase[static_cast<std::size_t>(g)];
            const Complex em = std::conj(ep);
            for (std::size_t comp = 0; comp < src_comp; comp++) {
                const Complex *a = src.data() + comp * len[l];
                Complex *out = dst.data() + comp * slice;
                for (std::size_t x = 0; x < slice; x++) {
                    out[x] = a[x] + em * a[slice + x] + ep * a[2 * slice + x];
                }
            }
            if (certify) {
                // Derivative with respect to the site being fixed: k = -1 and +1 terms times i k.
                const Complex *a = src.data();
                Complex *out = dst.data() + src_comp * slice;
                for (std::size_t x = 0; x < slice; x++) {
                    out[x] = i_unit * (ep * a[2 * slice + x] - em * a[slice + x]);
                }
            }
            self(self, l + 1);
        }
    };
    rec(rec, 0);
    return scan;
}

/// Largest even grid size <= requested with grid^n <= budget.
inline int effective_grid(std::size_t n, int requested, double budget) {
    int g = requested;
    while (g > 2 && std::pow(static_cast<double>(g), static_cast<double>(n)) > budget) {
        g--;
    }
    if (g > 2 && g % 2 == 1) {
        g--;
    }
    return g;
}

enum class BlockBackend { Dense, Fourier, Contraction };

/// 2^n times the block probability as a function of the assignment.
class BlockObjective {
   public:
    BlockObjective(const BlockSpec &b, double r, BlockBackend backend)
        : block_(b), r_(r), radii_(b.radii(r)), backend_(backend) {
        if (backend == BlockBackend::Contraction) {
            engine_.emplace(b);
        } else if (backend == BlockBackend::Fourier) {
            fourier_ = block_fourier(b, r);
        } else {
            detail::check_dense_cap(b.size());
        }
    }

    double operator()(const std::vector<double> &theta) {
        evaluations_++;
        switch (backend_) {
            case BlockBackend::Contraction: return engine_->scaled(radii_, theta);
            case BlockBackend::Fourier: return block_prob_fourier(fourier_, theta) / detail::block_scale(block_.size());
            default: return block_prob_dense(block_, r_, {theta}) / detail::block_scale(block_.size());
        }
    }

    std::size_t evaluations() const {
        return evaluations_;
    }

   private:
    BlockSpec block_;
    double r_;
    std::vector<double> radii_;
    BlockBackend backend_;
    std::optional<BlockContraction> engine_;
    BlockFourier fourier_;
    std::size_t evaluations_ = 0;
};

/// Exact coordinate descent: along one angle the objective is
/// A + B cos(t) + C sin(t), minimized at t = atan2(-C, -B). With no_y the
/// angles stay in {0, pi}.
inline double coordinate_descent(BlockObjective &f, std::vector<double> &theta, int max_sweeps, bool no_y) {
    double cur = f(theta);
    for (int sweep = 0; sweep < max_sweeps; sweep++) {
        const double before = cur;
        for (std::size_t i = 0; i < theta.size(); i++) {
            theta[i] = 0;
            double p0 = f(theta);
            theta[i] = std::numbers::pi;
            double pp = f(theta);
            if (no_y) {
                theta[i] = p0 <= pp ? 0.0 : std::numbers::pi;
                cur = std::min(p0, pp);
                continue;
            }
            theta[i] = std::numbers::pi / 2;
            double ph = f(theta);
            double a = (p0 + pp) / 2;
            double b = (p0 - pp) / 2;
            double c = ph - a;
            theta[i] = canonical_angle(std::atan2(-c, -b));
            cur = a - std::hypot(b, c);
        }
        if (before - cur <= 1e-14 * std::max(1.0, std::abs(cur))) {
            break;
        }
    }
    return f(theta);
}

struct MinimizeOptions {
    /// Angles per site for the initial grid scan (skipped if over budget).
    int grid = 32;
    double grid_budget = 1 << 22;
    /// Random restarts of the descent, drawn from a stream seeded by `seed`.
    int restarts = 8;
    uint64_t seed = 1;
    int max_sweeps = 200;
    /// Restrict inputs to theta in {0, pi} (no Y component).
    bool no_y = false;
    BlockBackend backend = BlockBackend::Contraction;
};

struct MinimizeResult {
    /// Minimal block probability found and the assignment attaining it.
    double value = std::numeric_limits<double>::infinity();
    BlockAssignment witness;
    std::size_t evaluations = 0;
};

inline std::vector<std::vector<double>> structured_starts(const BlockSpec &b, bool no_y) {
    const std::size_t n = b.size();
    std::vector<std::vector<double>> out;
    out.emplace_back(n, 0.0);
    out.emplace_back(n, std::numbers::pi);
    std::vector<double> checker(n);
    for (int i = 0; i < b.height; i++) {
        for (int j = 0; j < b.width; j++) {
            checker[static_cast<std::size_t>(i * b.width + j)] = ((i + j) % 2) ? std::numbers::pi : 0.0;
        }
    }
    out.push_back(checker);
    if (!no_y) {
        out.emplace_back(n, std::numbers::pi / 2);
    }
    return out;
}

/// Minimizes the block probability over assignments: grid scan (when it
/// fits the budget), then descent from the grid optimum, structured and
/// warm starts, and random restarts.
inline MinimizeResult minimize_block_prob(const BlockSpec &b, double r, const MinimizeOptions &opt,
                                          const std::vector<std::vector<double>> &warm_starts = {}) {
    b.validate();
    const std::size_t n = b.size();
    BlockObjective f(b, r, opt.backend);
    std::vector<std::vector<double>> starts = warm_starts;
    for (auto &s : structured_starts(b, opt.no_y)) {
        starts.push_back(std::move(s));
    }
    if (opt.no_y) {
        if (n <= 12) {
            for (std::size_t mask = 0; mask < (std::size_t{1} << n); mask++) {
                std::vector<double> th(n);
                for (std::size_t i = 0; i < n; i++) {
                    th[i] = ((mask >> i) & 1) ? std::numbers::pi : 0.0;
                }
                starts.push_back(std::move(th));
            }
        }
    } else if (n <= 16) {
        int g = effective_grid(n, opt.grid, opt.grid_budget);
        if (std::pow(static_cast<double>(g), static_cast<double>(n)) <= opt.grid_budget) {
            GridScan scan = scan_fourier_grid(block_fourier(b, r), g, false);
            starts.insert(starts.begin(), scan.argmin);
        }
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(0.0, kTwoPi);
    std::bernoulli_distribution coin(0.5);
    for (int k = 0; k < opt.restarts; k++) {
        std::vector<double> th(n);
        for (auto &t : th) {
            t = opt.no_y ? (coin(rng) ? std::numbers::pi : 0.0) : unif(rng);
        }
        starts.push_back(std::move(th));
    }
    MinimizeResult best;
    const bool exhaustive_binary = opt.no_y && n <= 12;
    for (auto &th : starts) {
        if (th.size() != n) {
            continue;
        }
        double v = exhaustive_binary ? f(th) : coordinate_descent(f, th, opt.max_sweeps, opt.no_y);
        if (v < best.value) {
            best.value = v;
            best.witness.theta = th;
        }
    }
    if (exhaustive_binary) {
        best.value = coordinate_descent(f, best.witness.theta, opt.max_sweeps, true);
    }
    for (auto &t : best.witness.theta) {
        t = canonical_angle(t);
    }
    best.value *= detail::block_scale(n);
    best.evaluations = f.evaluations();
    return best;
}

/// Minimization restricted to inputs without Y component (theta in {0, pi}),
/// the conjectured optimizers. Heuristic: a witness is exact, optimality is not.
inline MinimizeResult conjecture_fast_path(const BlockSpec &b, double r, MinimizeOptions opt = {}) {
    opt.no_y = true;
    return minimize_block_prob(b, r, opt);
}

struct SEstimateOptions {
    /// Angles per site; used for the search scan and the certified scan.
    int grid = 64;
    double bisect_tol = 1e-5;
    /// Certification reduces the grid until grid^n fits this budget.
    double certify_budget = 1 << 26;
    MinimizeOptions search;
    /// Bisection upper start; doubled until a negative witness appears.
    double r_start = 1;
    double r_limit = 1024;
    /// A witness counts as negative when 2^n p falls below -negativity_tol.
    double negativity_tol = 1e-12;
};

struct SEstimate {
    BlockSpec block;
    /// Largest radius at which the certified grid scan proved positivity.
    double lower = 0;
    /// Smallest radius at which a negative witness was found.
    double upper = std::numeric_limits<double>::infinity();
    bool upper_found = false;
    BlockAssignment witness;
    double witness_value = 0;
    int search_grid = 0;
    int certified_grid = 0;
    /// Taylor terms at the certified radius: cell half-width and H h^2 / 2.
    double cell_half_width = 0;
    double curvature_margin = 0;
    /// min grid value minus min certified value at `lower` (both scaled by 2^n).
    double certification_gap = 0;
};

/// Brackets the positivity threshold max{r : block probability >= 0 for all
/// assignments}. Positivity is monotone in r, since a smaller radius is a
/// dephasing of a larger one and dephasing maps permitted measurements to
/// mixtures of permitted measurements.
inline SEstimate s_estimate(const BlockSpec &b, const SEstimateOptions &opt = {}) {
    b.validate();
    const std::size_t n = b.size();
    SEstimate est;
    est.block = b;
    MinimizeOptions search = opt.search;
    search.grid = opt.grid;
    est.search_grid = effective_grid(n, opt.grid, search.grid_budget);

    std::vector<std::vector<double>> warm;
    auto probe = [&](double r) {
        MinimizeResult m = minimize_block_prob(b, r, search, warm);
        double scaled = m.value / detail::block_scale(n);
        if (scaled < -opt.negativity_tol) {
            warm = {m.witness.theta};
            est.witness = m.witness;
            est.witness_value = m.value;
            return true;
        }
        return false;
    };

    double lo = 0;
    double hi = opt.r_start;
    while (!probe(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > opt.r_limit) {
            break;
        }
    }
    if (hi <= opt.r_limit) {
        est.upper_found = true;
        while (hi - lo > opt.bisect_tol) {
            double mid = (lo + hi) / 2;
            if (probe(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        est.upper = hi;
        // Re-evaluate the final witness at the reported upper bound.
        BlockObjective f(b, est.upper, search.backend);
        est.witness_value = f(est.witness.theta) * detail::block_scale(n);
    }

    if (n > 16) {
        return est;
    }
    est.certified_grid = effective_grid(n, opt.grid, opt.certify_budget);
    est.cell_half_width = std::numbers::pi / est.certified_grid;
    auto certified = [&](double r) {
        GridScan scan = scan_fourier_grid(block_fourier(b, r), est.certified_grid, true);
        return scan.min_certified >= 0;
    };
    double clo = 0;
    double chi = est.upper_found ? est.upper : opt.r_limit;
    while (chi - clo > opt.bisect_tol) {
        double mid = (clo + chi) / 2;
        if (certified(mid)) {
            clo = mid;
        } else {
            chi = mid;
        }
    }
    est.lower = clo;
    BlockFourier fl = block_fourier(b, clo);
    GridScan at_lower = scan_fourier_grid(fl, est.certified_grid, true);
    est.curvature_margin = 0.5 * fl.curvature_bound * est.cell_half_width * est.cell_half_width;
    est.certification_gap = at_lower.min_value - at_lower.min_certified;
    return est;
}

/// Threshold of the no-Y fast path: the smallest radius (to tol) with a
/// negative no-Y witness inside [lo, hi]. Returns +inf if hi has none.
inline std::pair<double, MinimizeResult> fast_path_threshold(const BlockSpec &b, double lo, double hi, double tol,
                                                             const MinimizeOptions &opt = {}) {
    MinimizeResult at_hi = conjecture_fast_path(b, hi, opt);
    if (!(at_hi.value < 0)) {
        return {std::numeric_limits<double>::infinity(), at_hi};
    }
    MinimizeResult best = at_hi;
    MinimizeOptions o = opt;
    while (hi - lo > tol) {
        double mid = (lo + hi) / 2;
        MinimizeResult m = conjecture_fast_path(b, mid, o);
        if (m.value < 0) {
            hi = mid;
            best = m;
        } else {
            lo = mid;
        }
    }
    return {hi, best};
}

struct Lemma4Report {
    SEstimate plain_k, plain_l, plain_kl;
    SEstimate lambda_k, lambda_l, lambda_kl;
    /// s(KL) <= min(s(K), s(L)).
    bool plain_joined_below = false;
    /// s_lambda(KL) >= min(s_lambda(K), s_lambda(L)).
    bool lambda_joined_above = false;
    /// s(F) >= s_lambda(F) for F in {K, L, KL}.
    bool plain_above_lambda = false;

    bool all() const {
        return plain_joined_below && lambda_joined_above && plain_above_lambda;
    }
};

/// Checks the three monotonicity relations between blocks K, L and their
/// join KL. An inequality a <= b passes when the brackets allow it, i.e.
/// lower(a) <= upper(b).
inline Lemma4Report lemma4_checks(const BlockSpec &k, const BlockSpec &l, const BlockSpec &kl,
                                  const SEstimateOptions &opt = {}) {
    if (k.size() + l.size() != kl.size()) {
        throw std::invalid_argument("the joined block must contain exactly the sites of both parts");
    }
    Lemma4Report rep;
    rep.plain_k = s_estimate(k.with_mode(BlockMode::Plain), opt);
    rep.plain_l = s_estimate(l.with_mode(BlockMode::Plain), opt);
    rep.plain_kl = s_estimate(kl.with_mode(BlockMode::Plain), opt);
    rep.lambda_k = s_estimate(k.with_mode(BlockMode::LambdaGrown), opt);
    rep.lambda_l = s_estimate(l.with_mode(BlockMode::LambdaGrown), opt);
    rep.lambda_kl = s_estimate(kl.with_mode(BlockMode::LambdaGrown), opt);
    rep.plain_joined_below = rep.plain_kl.lower <= std::min(rep.plain_k.upper, rep.plain_l.upper);
    rep.lambda_joined_above = std::min(rep.lambda_k.lower, rep.lambda_l.lower) <= rep.lambda_kl.upper;
    rep.plain_above_lambda = rep.lambda_k.lower <= rep.plain_k.upper && rep.lambda_l.lower <= rep.plain_l.upper &&
                             rep.lambda_kl.lower <= rep.plain_kl.upper;
    return rep;
}

/// Blocks of the coarse-graining sequence: B1 = 2x2, and B(n+1) joins two
/// copies of B(n) along the side that keeps the block closest to square.
inline BlockSpec sequence_block(int index, BlockMode mode) {
    if (index < 1) {
        throw std::invalid_argument("sequence index starts at 1");
    }
    int h = 2;
    int w = 2;
    for (int i = 1; i < index; i++) {
        if (w <= h) {
            w *= 2;
        } else {
            h *= 2;
        }
    }
    return BlockSpec::rectangle(h, w, mode);
}

}  // namespace cylsim
