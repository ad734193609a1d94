// Copyright 2026 The phonon-optics Authors
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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Expected values come from the dense oracles in oracles.hpp or from
// closed forms evaluated here.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "phonon/cli.hpp"
#include "seq_fixtures.hpp"

using namespace phonon;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const double kR = 1.0 / std::sqrt(2.0);

/// |a1>_c|b1>_r + sign |a2>_c|b2>_r from the factorial formula.
Eigen::VectorXcd pair_expansion(cd a1, cd b1, cd a2, cd b2, double sign, int nmax) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(oracle::dim(nmax));
    for (int m = 0; m <= nmax; ++m)
        for (int n = 0; m + n <= nmax; ++n)
            v(oracle::idx(m, n)) = oracle::coherent_coeff(a1, m) * oracle::coherent_coeff(b1, n) +
                                   sign * oracle::coherent_coeff(a2, m) * oracle::coherent_coeff(b2, n);
    return v;
}

std::vector<double> marginal(const MotionalState& s, Mode mode) {
    std::vector<double> p(static_cast<std::size_t>(s.truncation().n_total_max()) + 1);
    for (int m = 0; m <= s.truncation().n_total_max(); ++m)
        for (int n = 0; m + n <= s.truncation().n_total_max(); ++n)
            p[static_cast<std::size_t>(mode == Mode::CenterOfMass ? m : n)] += std::norm(s.amplitude(m, n));
    return p;
}

/// Dense matrix of a map on joint states, column by column.
Eigen::MatrixXcd joint_matrix(const std::function<JointState(const JointState&)>& f, bool ion1, bool ion2, int nmax) {
    const Truncation t(nmax);
    const auto sectors = (ion1 ? 2 : 1) * (ion2 ? 2 : 1);
    const Eigen::Index d = sectors * oracle::dim(nmax);
    Eigen::MatrixXcd u(d, d);
    for (Eigen::Index col = 0; col < d; ++col) {
        std::vector<cd> amps(static_cast<std::size_t>(d));
        amps[static_cast<std::size_t>(col)] = 1.0;
        u.col(col) = oracle::vec(f(JointState(ion1, ion2, t, amps)));
    }
    return u;
}

double unitarity_error(const Eigen::MatrixXcd& u) {
    return oracle::max_abs(u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()));
}

Outcome beam_splitter_closed_forms() {
    Outcome o;
    const Truncation t(6);
    double worst = 0.0;
    for (int i = 0; i < 32; ++i) {
        const double th = 2.0 * kPi * i / 32.0;
        const double c = std::cos(th / 2), s = std::sin(th / 2);
        const Eigen::VectorXcd v_b1_one = c * oracle::basis(6, 1, 0) + cd(0.0, -s) * oracle::basis(6, 0, 1);
        const Eigen::VectorXcd v_b2_one = c * oracle::basis(6, 1, 0) + s * oracle::basis(6, 0, 1);
        const Eigen::VectorXcd v_b1_pair = std::cos(th) * oracle::basis(6, 1, 1) +
                                     cd(0.0, -std::sin(th) * kR) * (oracle::basis(6, 2, 0) + oracle::basis(6, 0, 2));
        const Eigen::VectorXcd v_b2_pair = std::cos(th) * oracle::basis(6, 1, 1) -
                                     std::sin(th) * kR * (oracle::basis(6, 2, 0) - oracle::basis(6, 0, 2));
        const std::pair<MotionalState, const Eigen::VectorXcd*> cases[] = {
            {entangled_number(BeamSplitterKind::B1, NumberInput::OneZero, th, t), &v_b1_one},
            {entangled_number(BeamSplitterKind::B2, NumberInput::OneZero, th, t), &v_b2_one},
            {entangled_number(BeamSplitterKind::B1, NumberInput::OneOne, th, t), &v_b1_pair},
            {entangled_number(BeamSplitterKind::B2, NumberInput::OneOne, th, t), &v_b2_pair}};
        for (const auto& [state, ref] : cases) worst = std::max(worst, (oracle::vec(state) - *ref).cwiseAbs().maxCoeff());
    }
    o.require(worst < 1e-12, "coefficient error " + fmt("%.3g", worst));
    o.detail = o.ok ? "max coefficient error " + fmt("%.2g", worst) : o.detail;
    return o;
}

Outcome coherent_product_rule() {
    Outcome o;
    const int nmax = 40;
    const Truncation t(nmax);
    double worst = 1.0;
    for (double a : {0.5, 1.0, 2.0})
        for (double b : {0.5, 1.0, 2.0})
            for (auto kind : {BeamSplitterKind::B1, BeamSplitterKind::B2})
                for (double th : {0.3, kPi / 2, 2.0, kPi}) {
                    const auto out = apply(beam_splitter(kind, th, t), make_coherent(a, b, t));
                    const double c = std::cos(th / 2), s = std::sin(th / 2);
                    const cd a2 = kind == BeamSplitterKind::B2 ? cd(a * c - b * s) : cd(a * c, -b * s);
                    const cd b2 = kind == BeamSplitterKind::B2 ? cd(a * s + b * c) : cd(b * c, -a * s);
                    const auto f = oracle::fidelity(oracle::vec(out), pair_expansion(a2, b2, 0.0, 0.0, 0.0, nmax));
                    worst = std::min(worst, f);
                }
    o.require(worst >= 1.0 - 1e-9, "fidelity " + fmt("%.15f", worst));
    o.detail = o.ok ? "min fidelity 1-" + fmt("%.2g", 1.0 - worst) : o.detail;
    return o;
}

Outcome entangled_cats() {
    Outcome o;
    const int nmax = 40;
    const Truncation t(nmax);
    double worst = 1.0;
    for (double a : {0.5, 1.0, 1.5})
        for (auto par : {Parity::Even, Parity::Odd})
            for (double th : {kPi / 2, 0.7, 2.4}) {
                const double sign = par == Parity::Even ? 1.0 : -1.0;
                const cd at = a * std::cos(th / 2), bt = a * std::sin(th / 2);
                const auto s = entangled_cat(a, par, th, t);
                worst = std::min(worst, oracle::fidelity(oracle::vec(s), pair_expansion(at, bt, -at, -bt, sign, nmax)));
            }
    const double em = (2.0 - 1.0) * kR, ep = (2.0 + 1.0) * kR;
    for (auto par : {Parity::Even, Parity::Odd}) {
        const double sign = par == Parity::Even ? 1.0 : -1.0;
        const auto js = entangled_cat_u2u3(1.0, 2.0, par, t);
        const auto [motion, p] = project_motion(js, QubitState::plus_x(), QubitState::ground());
        o.require(std::abs(p - 1.0) < 1e-12, "ions left their preparation");
        worst = std::min(worst, oracle::fidelity(oracle::vec(motion), pair_expansion(em, ep, ep, em, sign, nmax)));
    }
    o.require(worst >= 1.0 - 1e-9, "fidelity " + fmt("%.15f", worst));
    o.detail = o.ok ? "min fidelity 1-" + fmt("%.2g", 1.0 - worst) : o.detail;
    return o;
}

Outcome mach_zehnder_statistics() {
    Outcome o;
    double err_mean = 0.0, err_square = 0.0, err_var = 0.0, err_dphi = 0.0;
    for (double n : {1.0, 4.0, 9.0}) {
        int nmax = static_cast<int>(n);
        while (make_coherent(0.0, std::sqrt(n), Truncation(nmax)).tail_mass() >= 1e-12) ++nmax;
        const auto in = make_coherent(0.0, std::sqrt(n), Truncation(nmax));
        for (int i = 0; i < 64; ++i) {
            const double phi = 2.0 * kPi * i / 64.0;
            const auto r = mz_report(in, phi, 1e-4);
            const double c = std::cos(phi);
            err_mean = std::max(err_mean, std::abs(r.mean_Jz - 0.5 * n * c));
            err_square = std::max(err_square, std::abs(r.mean_Jz2 - 0.25 * n * (1.0 + n * c * c)));
            err_var = std::max(err_var, std::abs(r.var_Jz - 0.25 * n));
        }
        err_dphi = std::max(err_dphi, std::abs(mz_report(in, kPi / 2, 1e-4).delta_phi - 1.0 / std::sqrt(n)));
    }
    o.require(err_mean < 1e-8, "<J_z> error " + fmt("%.3g", err_mean));
    o.require(err_square < 1e-7, "<J_z^2> error " + fmt("%.3g", err_square));
    o.require(err_var < 1e-8, "variance error " + fmt("%.3g", err_var));
    o.require(err_dphi < 1e-6, "delta_phi error " + fmt("%.3g", err_dphi));
    if (o.ok) {
        o.detail = "errors <J_z> " + fmt("%.2g", err_mean) + ", <J_z^2> " + fmt("%.2g", err_square) + ", var " + fmt("%.2g", err_var) +
                   ", delta_phi " + fmt("%.2g", err_dphi);
    }
    return o;
}

Outcome detection_equivalence() {
    Outcome o;
    std::mt19937 rng(2026);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int nmax = 1 + trial % 8;
        const auto s = oracle::random_state(rng, nmax);
        const auto js = JointState::product(std::nullopt, QubitState::ground(), s);
        const auto times = uniform_times(0.9, 6.0 * kPi, 24);
        for (auto kind : {JcmKind::Single, JcmKind::Two}) {
            const auto tr = signal(s, 0.9, times, kind);
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double p = ground_probability(jcm_propagate(js, 0.9, times[i], kind), Ion::Two);
                worst = std::max(worst, std::abs(tr.values[i] - p));
            }
        }
    }
    o.require(worst < 1e-12, "trace mismatch " + fmt("%.3g", worst));
    o.detail = o.ok ? "max deviation " + fmt("%.2g", worst) + " over 50 states" : o.detail;
    return o;
}

Outcome reconstruction_round_trip() {
    Outcome o;
    std::mt19937 rng(6);
    const auto times = uniform_times(1.0, 8.0 * kPi, 256);
    double single_l1 = 0.0, two_l1 = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = oracle::random_state(rng, 8);
        for (auto mode : {Mode::CenterOfMass, Mode::Breathing}) {
            const auto rec = reconstruct_single(signal(s, 1.0, times, JcmKind::Single, mode), 8);
            const auto truth = marginal(s, mode);
            double l1 = 0.0;
            for (std::size_t m = 0; m < truth.size(); ++m) l1 += std::abs(rec.p[m] - truth[m]);
            single_l1 = std::max(single_l1, l1);
        }
        const int nmax = 2 + trial % 7;
        const auto s2 = oracle::random_state(rng, nmax);
        const int k_max = (nmax / 2) * (nmax - nmax / 2);
        const auto rec = reconstruct_two(signal(s2, 1.0, times, JcmKind::Two), k_max);
        std::map<int, double> truth;
        for (int m = 0; m <= nmax; ++m)
            for (int n = 0; m + n <= nmax; ++n) truth[m * n] += std::norm(s2.amplitude(m, n));
        double l1 = 0.0;
        for (int k = 0; k <= k_max; ++k) l1 += std::abs(rec.q.at(k) - (truth.count(k) ? truth.at(k) : 0.0));
        two_l1 = std::max(two_l1, l1);
    }
    const Truncation t(6);
    const auto base = signal(make_fock(2, 2, t), 1.0, times, JcmKind::Two);
    double degenerate = 0.0;
    for (double w : {0.0, 0.25, 0.5, 1.0}) {
        std::vector<cd> amps(t.dim());
        amps[t.index(2, 2)] = std::sqrt(1.0 - w);
        amps[t.index(1, 4)] = cd(0.0, std::sqrt(w));
        const auto tr = signal(MotionalState(t, amps), 1.0, times, JcmKind::Two);
        for (std::size_t i = 0; i < times.size(); ++i) degenerate = std::max(degenerate, std::abs(tr.values[i] - base.values[i]));
    }
    o.require(single_l1 < 1e-3, "single-mode L1 " + fmt("%.3g", single_l1));
    o.require(two_l1 < 1e-3, "two-mode L1 " + fmt("%.3g", two_l1));
    o.require(degenerate < 1e-12, "degenerate traces differ by " + fmt("%.3g", degenerate));
    if (o.ok) {
        o.detail = "L1 single " + fmt("%.2g", single_l1) + ", two " + fmt("%.2g", two_l1) + "; |2,2>/|1,4> traces equal to " +
                   fmt("%.2g", degenerate);
    }
    return o;
}

Outcome direct_method() {
    Outcome o;
    std::mt19937 rng(42);
    double closed_err = 0.0, rel_err = 0.0;
    std::vector<MotionalState> states;
    for (int trial = 0; trial < 20; ++trial) states.push_back(oracle::random_state(rng, 1 + trial % 10));
    for (int m = 1; m <= 10; ++m) states.push_back(make_fock(m, 10 - m, Truncation(10)));
    for (double nbar : {0.5, 2.0, 6.0, 10.0}) states.push_back(make_coherent(std::sqrt(nbar), 0.3, Truncation(60)));
    for (const auto& s : states) {
        for (auto mode : {Mode::CenterOfMass, Mode::Breathing}) {
            const auto est = direct_mean_phonon(s, 1e-3, 1.0, mode);
            const auto p = marginal(s, mode);
            double closed = 0.0, mean = 0.0;
            for (std::size_t n = 0; n < p.size(); ++n) {
                closed -= p[n] * std::sin(2e-3 * static_cast<double>(n));
                mean += p[n] * static_cast<double>(n);
            }
            closed_err = std::max(closed_err, std::abs(est.sigma_x_exact - closed));
            if (mean > 0.0 && mean <= 10.0) rel_err = std::max(rel_err, std::abs(est.mean_n_linearized - mean) / mean);
        }
    }
    const auto c = jz_from_methods(mz_output(make_coherent(0.0, 2.0, Truncation(40)), kPi / 3));
    const double three_way = std::max({c.exact_vs_reconstructed(), c.exact_vs_direct(), c.reconstructed_vs_direct()});
    o.require(closed_err < 1e-12, "closed-form mismatch " + fmt("%.3g", closed_err));
    o.require(rel_err < 1e-4, "linearised relative error " + fmt("%.3g", rel_err));
    o.require(three_way < 1e-3, "three-way spread " + fmt("%.3g", three_way));
    if (o.ok) {
        o.detail = "closed form " + fmt("%.2g", closed_err) + ", linearised rel " + fmt("%.2g", rel_err) +
                   ", <J_z> spread " + fmt("%.2g", three_way);
    }
    return o;
}

Outcome structural_properties() {
    Outcome o;
    double unit = 0.0;
    for (int nmax : {0, 3, 6, 20}) {
        const Truncation t(nmax);
        for (double a : {-2.3, 0.4, 5.1}) {
            unit = std::max({unit, beam_splitter(BeamSplitterKind::B1, a, t).max_unitarity_error(),
                             beam_splitter(BeamSplitterKind::B2, a, t).max_unitarity_error(),
                             phase_shifter(Mode::CenterOfMass, a, t).max_unitarity_error(),
                             phase_shifter(Mode::Breathing, a, t).max_unitarity_error()});
            for (auto kind : {JcmKind::Single, JcmKind::Two})
                unit = std::max(unit, jcm_operator(1.0, a, kind, t).max_unitarity_error());
        }
    }
    for (int nmax : {0, 2, 5}) {
        unit = std::max(unit, unitarity_error(joint_matrix(
                                  [](const JointState& js) { return joint_bs_propagator(BeamSplitterKind::B1, 0.9, js); },
                                  true, false, nmax)));
        unit = std::max(unit, unitarity_error(joint_matrix(
                                  [](const JointState& js) { return conditional_phase(Mode::Breathing, 1.3, js); }, false,
                                  true, nmax)));
        unit = std::max(unit, unitarity_error(joint_matrix(
                                  [](const JointState& js) { return carrier_rotation(Ion::Two, kPi / 2, js); }, true, true,
                                  nmax)));
    }

    bool block_exact = true;
    for (int nmax : {4, 8}) {
        const Truncation t(nmax);
        for (auto kind : {BeamSplitterKind::B1, BeamSplitterKind::B2}) {
            const auto b = beam_splitter(kind, 1.234, t);
            for (const auto& blk : b.blocks())
                for (auto idx : blk.support)
                    block_exact = block_exact && t.mode_numbers(idx).first + t.mode_numbers(idx).second == blk.label;
            const Eigen::MatrixXcd u = b.to_dense();
            for (Eigen::Index i = 0; i < u.rows(); ++i)
                for (Eigen::Index j = 0; j < u.cols(); ++j) {
                    const auto [mi, ni] = t.mode_numbers(static_cast<std::size_t>(i));
                    const auto [mj, nj] = t.mode_numbers(static_cast<std::size_t>(j));
                    if (mi + ni != mj + nj) block_exact = block_exact && u(i, j) == cd(0.0);
                }
        }
    }

    double oracle_err = 0.0;
    for (int nmax = 0; nmax <= 6; ++nmax) {
        const Truncation t(nmax);
        const auto ops = oracle::schwinger(nmax);
        for (double th : {-2.1, 0.6, 3.9}) {
            oracle_err = std::max({oracle_err,
                                   oracle::max_abs(beam_splitter(BeamSplitterKind::B1, th, t).to_dense() - oracle::expi(ops.jx, th)),
                                   oracle::max_abs(beam_splitter(BeamSplitterKind::B2, th, t).to_dense() - oracle::expi(ops.jy, th)),
                                   oracle::max_abs(phase_shifter(Mode::CenterOfMass, th, t).to_dense() - oracle::expi(ops.nc, -th)),
                                   oracle::max_abs(phase_shifter(Mode::Breathing, th, t).to_dense() - oracle::expi(ops.nr, -th))});
            Eigen::Matrix2cd sz_half;
            sz_half << -0.5, 0, 0, 1.5;
            const Eigen::MatrixXcd gen = oracle::kron(sz_half, ops.nc);
            const auto cp = joint_matrix([th](const JointState& js) { return conditional_phase(Mode::CenterOfMass, th, js); },
                                         false, true, nmax);
            oracle_err = std::max(oracle_err, oracle::max_abs(cp - oracle::expi(gen, th)));
            const Eigen::MatrixXcd gx = oracle::kron(oracle::sigma_x(), ops.jx);
            const auto jb = joint_matrix([th](const JointState& js) { return joint_bs_propagator(BeamSplitterKind::B1, th, js); },
                                         true, false, nmax);
            oracle_err = std::max(oracle_err, oracle::max_abs(jb - oracle::expi(gx, th)));
        }
    }

    double factor = 1.0;
    std::mt19937 rng(8);
    for (int k = 0; k < 10; ++k) {
        const auto psi = oracle::random_state(rng, 6);
        const double th = 0.41 * (k + 1);
        for (auto kind : {BeamSplitterKind::B1, BeamSplitterKind::B2})
            for (int sign : {+1, -1}) {
                const auto q = sign > 0 ? QubitState::plus_x() : QubitState::minus_x();
                const auto out = joint_bs_propagator(kind, th, JointState::product(q, std::nullopt, psi));
                const auto [motion, p] = project_motion(out, q, std::nullopt);
                factor = std::min({factor, p, fidelity(motion, apply(beam_splitter(kind, sign * th, Truncation(6)), psi))});
            }
    }
    o.require(unit < 1e-12, "unitarity error " + fmt("%.3g", unit));
    o.require(block_exact, "beam splitter couples different total numbers");
    o.require(oracle_err < 1e-10, "oracle mismatch " + fmt("%.3g", oracle_err));
    o.require(factor >= 1.0 - 1e-12, "factorisation fidelity " + fmt("%.15f", factor));
    if (o.ok) {
        o.detail = "unitarity " + fmt("%.2g", unit) + ", block structure exact, oracle " + fmt("%.2g", oracle_err) +
                   ", factorisation 1-" + fmt("%.2g", 1.0 - factor);
    }
    return o;
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "phonon");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome parser_and_cli() {
    Outcome o;
    fixtures::ProgramGenerator gen(9);
    int round_trips = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = gen.program();
        const auto text = seq::format(p);
        try {
            const auto back = seq::parse(text);
            const auto noisy = seq::parse(gen.noisy_text(p));
            if (seq::structurally_equal(back, p) && seq::structurally_equal(noisy, p) && seq::format(back) == text) ++round_trips;
        } catch (const seq::ParseError&) {
        }
    }
    o.require(round_trips == 1000, std::to_string(1000 - round_trips) + " programs failed to round-trip");

    int located = 0;
    const auto cases = fixtures::error_cases();
    for (const auto& c : cases) {
        try {
            seq::parse(c.text);
        } catch (const seq::ParseError& e) {
            if (e.line() == c.line && e.column() == c.column) ++located;
        }
    }
    o.require(located == static_cast<int>(cases.size()),
              std::to_string(cases.size() - static_cast<std::size_t>(located)) + " grammar errors misplaced");

    const auto dir = std::filesystem::temp_directory_path() / "phonon_acceptance";
    std::filesystem::create_directories(dir);
    const auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    const std::vector<std::pair<std::vector<std::string>, int>> contract{
        {{"run", put("ok.seq", "init coherent 0 0 2 0 nmax 40\nmz pi/3\nreport\n")}, cli::kOk},
        {{"run", put("bad.seq", "init fock 0 0 nmax 2\nbs1\n")}, cli::kParseError},
        {{"run", put("odd.seq", "init cat 0 0 odd c nmax 4\n")}, cli::kRuntimeError},
        {{"run", (dir / "absent.seq").string()}, cli::kIoError},
        {{"sweep", "--state", "coherent 0 0 2 0 nmax 40"}, cli::kOk},
        {{"sweep", "--state", "fock 0 0 nmax 2", "--points", "1"}, cli::kParseError},
        {{"sweep", "--state", "fock 0 0 nmax 2", "--fd-step", "0"}, cli::kRuntimeError},
        {{"sweep", "--state", "fock 0 0 nmax 2", "--out", (dir / "missing" / "s.csv").string()}, cli::kIoError},
        {{"detect", "--state", "fock 1 1 nmax 2", "--method", "two"}, cli::kOk},
        {{"detect", "--state", "fock 1 1 nmax 2", "--method", "four"}, cli::kParseError},
    };
    int honoured = 0;
    for (const auto& [args, code] : contract) honoured += run_cli(args) == code ? 1 : 0;
    std::filesystem::remove_all(dir);
    o.require(honoured == static_cast<int>(contract.size()),
              std::to_string(contract.size() - static_cast<std::size_t>(honoured)) + " exit codes wrong");
    if (o.ok) {
        o.detail = "1000 round-trips, " + std::to_string(located) + " located errors, " + std::to_string(honoured) +
                   " exit-code checks";
    }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;  // 0 means no time limit
        Outcome (*check)();
    };
    const Criterion criteria[] = {
        {1, "beam-splitter closed forms", 1.0, beam_splitter_closed_forms},
        {2, "coherent product rule", 5.0, coherent_product_rule},
        {3, "entangled cats", 0.0, entangled_cats},
        {4, "Mach-Zehnder statistics", 30.0, mach_zehnder_statistics},
        {5, "detection equivalence", 0.0, detection_equivalence},
        {6, "reconstruction round-trip", 0.0, reconstruction_round_trip},
        {7, "direct method", 0.0, direct_method},
        {8, "structural properties", 0.0, structural_properties},
        {9, "parser and CLI contract", 0.0, parser_and_cli},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0.0 && secs >= c.budget_s) {
            o.ok = false;
            o.detail = "runtime " + fmt("%.2f", secs) + " s exceeds " + fmt("%.0f", c.budget_s) + " s";
        }
        failures += o.ok ? 0 : 1;
        std::printf("%s %d %s: %s (%.3f s)\n", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
