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

// Command-line front end: sampling, oracle comparison, CZ decomposition,
// coarse-graining bounds, purification chains and qudit checks.
//
// Exit codes: 0 success, 1 other error, 2 non-simulable input, 3 resource cap.

#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cylsim.hpp"

namespace {

using cylsim::Json;

constexpr int kExitOther = 1;
constexpr int kExitNotSimulable = 2;
constexpr int kExitCap = 3;

struct Config {
    std::string circuit;
    std::string out;
    uint64_t shots = 0;
    uint64_t seed = 0;
    double growth_margin = 1e-3;
    int grid = 64;
    std::string block = "2x2";
    std::string mode = "lambda";
    std::string angles;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    double bisect_tol = 1e-5;
    double epsilon = 0.02;
    double radius = -1;
    bool fast_path = false;
    int restarts = 16;
    std::size_t n_ancilla = 3;
    double r_cap = 0.845;
    int d = 2;
    std::size_t n_sites = 2;
    std::string gate = "cphase";
    int eta_grid = 200;
    int meas_grid = 16;
};

Json config_echo(const std::string &command, const Config &c) {
    return {{"command", command},
            {"circuit", c.circuit},
            {"out", c.out},
            {"shots", c.shots},
            {"seed", c.seed},
            {"growth_margin", c.growth_margin},
            {"grid", c.grid},
            {"block", c.block},
            {"mode", c.mode},
            {"angles", c.angles},
            {"bisect_tol", c.bisect_tol},
            {"epsilon", c.epsilon},
            {"radius", c.radius},
            {"fast_path", c.fast_path},
            {"restarts", c.restarts},
            {"n_ancilla", c.n_ancilla},
            {"r_cap", c.r_cap},
            {"d", c.d},
            {"n", c.n_sites},
            {"gate", c.gate},
            {"eta_grid", c.eta_grid},
            {"meas_grid", c.meas_grid}};
}

/// Writes `text` to `path`, or to stdout when path is empty.
void emit(const std::string &path, const std::string &text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
}

cylsim::StochasticRep sampler_rep(const Config &c) {
    double growth = cylsim::symmetric_growth() * (1 + c.growth_margin);
    return cylsim::build_for_growth(growth, c.grid);
}

int cmd_sample(const Config &c) {
    auto circuit = cylsim::load_circuit(c.circuit);
    auto rep = sampler_rep(c);
    auto report = cylsim::check_simulable(circuit, rep.growth);
    if (!report.simulable) {
        std::cerr << cylsim::simulability_to_json(report).dump(2) << "\n";
        return kExitNotSimulable;
    }
    auto table = cylsim::sample(circuit, rep, c.shots, c.seed, c.threads);
    std::ostringstream csv;
    csv << "bitstring,count\n";
    for (const auto &[k, n] : table) {
        csv << k << ',' << n << '\n';
    }
    emit(c.out, csv.str());
    Json prov;
    prov["config"] = config_echo("sample", c);
    prov["config"].erase("threads");
    prov["growth"] = rep.growth;
    prov["simulability"] = cylsim::simulability_to_json(report);
    prov["stochastic_rep"] = cylsim::rep_to_json(rep);
    prov["circuit_json"] = cylsim::circuit_to_json(circuit);
    emit(c.out.empty() ? std::string() : c.out + ".provenance.json", prov.dump(2) + "\n");
    return 0;
}

int cmd_compare(const Config &c) {
    auto circuit = cylsim::load_circuit(c.circuit);
    auto exact = cylsim::exact_distribution(circuit);
    auto rep = sampler_rep(c);
    auto report = cylsim::check_simulable(circuit, rep.growth);
    if (!report.simulable) {
        std::cerr << cylsim::simulability_to_json(report).dump(2) << "\n";
        return kExitNotSimulable;
    }
    auto table = cylsim::sample(circuit, rep, c.shots, c.seed, c.threads);
    double tv = cylsim::tv_distance(cylsim::empirical_distribution(table), exact);
    Json j{{"tv", tv},
           {"shots", c.shots},
           {"seed", c.seed},
           {"epsilon", c.epsilon},
           {"epsilon_pass", tv <= c.epsilon},
           {"growth", rep.growth}};
    emit(c.out, j.dump(2) + "\n");
    return 0;
}

int cmd_lemma1(const Config &c) {
    double lam = cylsim::symmetric_growth();
    std::ostringstream text;
    text.precision(12);
    text << "lambda = " << lam << "\n";
    auto rep = sampler_rep(c);
    auto ppt = cylsim::ppt_determinants(1 / lam, 1 / lam);
    Json j{{"lambda", lam},
           {"lambda_pow_minus4", std::pow(lam, -4)},
           {"separability_slack_at_lambda", cylsim::separability_slack(1, 1, lam, lam)},
           {"outer_determinant_at_lambda", ppt.outer},
           {"growth_margin", c.growth_margin},
           {"stochastic_rep", cylsim::rep_to_json(rep)}};
    std::cout << text.str();
    if (!c.out.empty()) {
        emit(c.out, j.dump(2) + "\n");
    } else {
        std::cout << j.dump(2) << "\n";
    }
    return 0;
}

cylsim::BlockSpec parse_block(const std::string &text, const std::string &mode) {
    auto x = text.find('x');
    if (x == std::string::npos) {
        throw std::invalid_argument("--block must look like HxW");
    }
    int h = std::stoi(text.substr(0, x));
    int w = std::stoi(text.substr(x + 1));
    cylsim::BlockMode m;
    if (mode == "plain") {
        m = cylsim::BlockMode::Plain;
    } else if (mode == "lambda") {
        m = cylsim::BlockMode::LambdaGrown;
    } else {
        throw std::invalid_argument("--mode must be plain or lambda");
    }
    return cylsim::BlockSpec::rectangle(h, w, m);
}

int cmd_coarse(const Config &c) {
    auto block = parse_block(c.block, c.mode);
    cylsim::MinimizeOptions search;
    search.restarts = c.restarts;
    search.seed = c.seed;
    Json j;
    if (c.fast_path) {
        if (!(c.radius > 0)) {
            throw std::invalid_argument("--fast-path needs --radius");
        }
        auto m = cylsim::conjecture_fast_path(block, c.radius, search);
        j = {{"block", block.label()},
             {"mode", cylsim::block_mode_name(block.mode)},
             {"radius", c.radius},
             {"min_probability", m.value},
             {"negative", m.value < 0},
             {"witness_assignment", m.witness.theta},
             {"heuristic", "no-Y inputs only"}};
    } else {
        cylsim::SEstimateOptions opt;
        opt.grid = c.grid;
        opt.bisect_tol = c.bisect_tol;
        opt.search = search;
        j = cylsim::s_estimate_to_json(cylsim::s_estimate(block, opt));
    }
    emit(c.out, j.dump(2) + "\n");
    return 0;
}

std::vector<double> parse_angles(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double scale = 1;
        auto p = item.find("pi");
        if (p != std::string::npos) {
            scale = std::numbers::pi;
            item = item.substr(0, p);
        }
        out.push_back((item.empty() ? 1.0 : std::stod(item)) * scale);
    }
    return out;
}

int cmd_purify(const Config &c) {
    Json j;
    if (!c.angles.empty()) {
        cylsim::ChainProtocol p{parse_angles(c.angles), 0.01 * std::numbers::pi};
        auto t = cylsim::trace_chain(p);
        double ps = cylsim::site_success_prob(p);
        j = {{"angles", p.angles},
             {"lattice_angle", t.lattice_angle},
             {"p_site", ps},
             {"r_max", cylsim::chain_r_max(p)},
             {"verdict", cylsim::percolation_verdict(ps)}};
    } else {
        j = cylsim::chain_to_json(cylsim::optimize_angles(c.n_ancilla, c.r_cap));
        j["r_cap"] = c.r_cap;
    }
    emit(c.out, j.dump(2) + "\n");
    return 0;
}

int cmd_pbs(const Config &c) {
    std::vector<cylsim::Complex> diag;
    std::size_t dim = 1;
    for (std::size_t j = 0; j < c.n_sites; j++) {
        dim *= static_cast<std::size_t>(c.d);
    }
    if (c.gate == "cphase") {
        if (c.n_sites != 2) {
            throw std::invalid_argument("cphase is a two-qudit gate");
        }
        diag = cylsim::controlled_phase_diagonal(c.d);
    } else if (c.gate == "identity") {
        diag.assign(dim, 1.0);
    } else {
        throw std::invalid_argument("--gate must be cphase or identity");
    }
    auto rep = cylsim::estimate_c(diag, c.d, c.n_sites, c.eta_grid, c.meas_grid);
    Json j = cylsim::estimate_c_to_json(rep, c.gate);

    // Identity checks on a seeded random Hermitian operator.
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(c.d, c.d);
    for (int r = 0; r < c.d; r++) {
        for (int s = 0; s < c.d; s++) {
            a(r, s) = cylsim::Complex(g(rng), g(rng));
        }
    }
    Eigen::MatrixXcd h = a + a.adjoint();
    h /= h.trace();
    auto gaps = cylsim::offdiag_identity_check(h);
    j["offdiag_gaps"] = {gaps.gap1, gaps.gap2};
    if (c.n_sites >= 2) {
        cylsim::QuditString as(c.n_sites, 0), xs(c.n_sites, 0), ys(c.n_sites, 1);
        xs[0] = 1;
        auto dec = cylsim::phase_decompose(as, xs, ys, {0.1, 0.05}, 3, c.d);
        double gap = (cylsim::reconstruct(dec) - cylsim::phase_target(as, xs, ys, {0.1, 0.05}, 3, c.d))
                         .cwiseAbs()
                         .maxCoeff();
        j["phase_reconstruction_gap"] = gap;
        j["cross_term_audit"] = cylsim::cross_term_audit(c.n_sites);
    }
    emit(c.out, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Cylinder-state simulator and coarse-graining bound calculator"};
    app.require_subcommand(1);
    Config cfg;

    auto *sample = app.add_subcommand("sample", "Sample measurement outcomes of a circuit");
    sample->add_option("--circuit", cfg.circuit, "Circuit JSON")->required();
    sample->add_option("--shots", cfg.shots, "Number of shots")->required();
    sample->add_option("--seed", cfg.seed, "Seed")->required();
    sample->add_option("--out", cfg.out, "Output CSV (provenance goes to OUT.provenance.json)");
    sample->add_option("--growth-margin", cfg.growth_margin, "Relative growth margin above lambda");
    sample->add_option("--grid", cfg.grid, "Angle grid of the CZ decomposition");
    sample->add_option("--threads", cfg.threads, "Worker threads");

    auto *compare = app.add_subcommand("compare", "Sampler versus exact distribution (total variation)");
    compare->add_option("--circuit", cfg.circuit, "Circuit JSON")->required();
    compare->add_option("--shots", cfg.shots, "Number of shots")->required();
    compare->add_option("--seed", cfg.seed, "Seed")->required();
    compare->add_option("--out", cfg.out, "Output JSON");
    compare->add_option("--growth-margin", cfg.growth_margin, "Relative growth margin above lambda");
    compare->add_option("--grid", cfg.grid, "Angle grid of the CZ decomposition");
    compare->add_option("--epsilon", cfg.epsilon, "Pass threshold for the distance");
    compare->add_option("--threads", cfg.threads, "Worker threads");

    auto *lemma1 = app.add_subcommand("lemma1", "Critical growth rate and the CZ decomposition");
    lemma1->add_option("--growth-margin", cfg.growth_margin, "Relative growth margin above lambda");
    lemma1->add_option("--grid", cfg.grid, "Angle grid of the CZ decomposition");
    lemma1->add_option("--out", cfg.out, "Output JSON");

    auto *coarse = app.add_subcommand("coarse", "Positivity threshold of a lattice block");
    coarse->add_option("--block", cfg.block, "Block size HxW");
    coarse->add_option("--mode", cfg.mode, "plain or lambda");
    coarse->add_option("--grid", cfg.grid, "Angles per site");
    coarse->add_option("--bisect-tol", cfg.bisect_tol, "Bisection tolerance on r");
    coarse->add_option("--seed", cfg.seed, "Seed for random restarts");
    coarse->add_option("--restarts", cfg.restarts, "Random restarts of the descent");
    coarse->add_flag("--fast-path", cfg.fast_path, "Only evaluate no-Y inputs at --radius");
    coarse->add_option("--radius", cfg.radius, "Radius for --fast-path");
    coarse->add_option("--out", cfg.out, "Output JSON");
    coarse->add_option("--threads", cfg.threads, "Worker threads");

    auto *purify = app.add_subcommand("purify", "Ancilla-chain steering probability");
    purify->add_option("--angles", cfg.angles, "Ancilla angles, e.g. 0.18pi,0.32pi,0.31pi");
    purify->add_option("--n-ancilla", cfg.n_ancilla, "Chain length when optimizing");
    purify->add_option("--r-cap", cfg.r_cap, "Cap on |sin phi| when optimizing");
    purify->add_option("--out", cfg.out, "Output JSON");

    auto *pbs = app.add_subcommand("pbs-verify", "Qudit identities and the disentangling bound");
    pbs->add_option("--d", cfg.d, "Qudit dimension");
    pbs->add_option("--n", cfg.n_sites, "Number of qudits");
    pbs->add_option("--gate", cfg.gate, "cphase or identity");
    pbs->add_option("--eta-grid", cfg.eta_grid, "Number of eta values scanned");
    pbs->add_option("--grid", cfg.meas_grid, "Equatorial phases per component");
    pbs->add_option("--seed", cfg.seed, "Seed for the random test operator");
    pbs->add_option("--out", cfg.out, "Output JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    try {
        if (*sample) {
            return cmd_sample(cfg);
        }
        if (*compare) {
            return cmd_compare(cfg);
        }
        if (*lemma1) {
            return cmd_lemma1(cfg);
        }
        if (*coarse) {
            return cmd_coarse(cfg);
        }
        if (*purify) {
            return cmd_purify(cfg);
        }
        if (*pbs) {
            return cmd_pbs(cfg);
        }
    } catch (const cylsim::NotSimulable &e) {
        std::cerr << cylsim::simulability_to_json(e.report()).dump(2) << "\n";
        return kExitNotSimulable;
    } catch (const cylsim::ResourceCapExceeded &e) {
        std::cerr << "resource cap exceeded: " << e.what() << "\n";
        return kExitCap;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOther;
    }
    return kExitOther;
}
