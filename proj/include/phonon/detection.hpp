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

// Motional-state detection through ion 2.
//
//  * single-mode Jaynes-Cummings probe  H = lambda (sigma_+ a + sigma_- a+)
//    P_g(tau) = [1 + sum_m p_m cos(2 lambda tau sqrt(m))] / 2
//  * two-mode probe  H = g (a b sigma_+ + a+ b+ sigma_-)
//    P_g(t) = [1 + sum_mn p_mn cos(2 g t sqrt(mn))] / 2
//  * direct readout: carrier pi/2 pulse, conditional phase, then <sigma_x>
//    <sigma_x2> = -<sin(2 chi t a+a)>
//
// Reconstruction fits the known frequency dictionary with non-negative least
// squares. The two-mode signal only depends on the level sets mn = k, so it
// yields q_k = sum_{mn=k} p_mn and nothing finer.

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "phonon/error.hpp"
#include "phonon/fockspace.hpp"
#include "phonon/nnls.hpp"
#include "phonon/operators.hpp"

namespace phonon {

enum class JcmKind { Single, Two };

inline const char* to_string(JcmKind k) { return k == JcmKind::Single ? "single" : "two"; }

struct SignalTrace {
    std::vector<double> times;   // s, strictly increasing
    std::vector<double> values;  // P_g
    double coupling = 1.0;       // rad/s (lambda or g)
    JcmKind kind = JcmKind::Single;
    Mode mode = Mode::CenterOfMass;  // probed mode of a single-mode trace
};

namespace detail {

/// Quantum number driving the Rabi frequency of |g, m, n>, and the partner
/// state |e, ...> it couples to.
struct JcmCoupling {
    int quanta;
    int partner_m, partner_n;
};

inline JcmCoupling jcm_coupling(JcmKind kind, Mode mode, int m, int n) {
    if (kind == JcmKind::Two) return {m * n, m - 1, n - 1};
    return mode == Mode::CenterOfMass ? JcmCoupling{m, m - 1, n} : JcmCoupling{n, m, n - 1};
}

inline void validate_times(const std::vector<double>& times) {
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw ArgumentError("sample times must be strictly increasing");
    }
}

}  // namespace detail

/// Exact propagator exp(-i H t) of the single- or two-mode JCM as 2x2 blocks
/// {|g,m,n>, |e,partner>} on the (ion 2) x motion space.
inline UnitaryOperator jcm_operator(double coupling, double t, JcmKind kind, Truncation trunc,
                                    Mode mode = Mode::CenterOfMass) {
    const std::size_t d = trunc.dim();
    std::vector<OperatorBlock> blocks;
    for (std::size_t idx = 0; idx < d; ++idx) {
        const auto [m, n] = trunc.mode_numbers(idx);
        const auto c = detail::jcm_coupling(kind, mode, m, n);
        if (c.quanta == 0) continue;
        const double angle = coupling * t * std::sqrt(static_cast<double>(c.quanta));
        Eigen::Matrix2cd u;
        u << std::cos(angle), cd{0.0, -std::sin(angle)}, cd{0.0, -std::sin(angle)}, std::cos(angle);
        blocks.push_back({static_cast<int>(idx), {idx, d + trunc.index(c.partner_m, c.partner_n)}, u});
    }
    return UnitaryOperator(OperatorKind::JcmBlock, trunc, 2 * d, std::move(blocks));
}

/// JCM evolution of ion 2 with the motion; ion 1 is a spectator. Excited
/// states whose partner |g, ...> lies beyond N_max cannot evolve exactly and
/// must carry no amplitude.
inline JointState jcm_propagate(const JointState& js, double coupling, double t, JcmKind kind,
                                Mode mode = Mode::CenterOfMass) {
    require_ion(js, Ion::Two);
    const auto& trunc = js.truncation();
    for (std::size_t idx = 0; idx < trunc.dim(); ++idx) {
        const auto [m, n] = trunc.mode_numbers(idx);
        const int gm = kind == JcmKind::Two || mode == Mode::CenterOfMass ? m + 1 : m;
        const int gn = kind == JcmKind::Two || mode == Mode::Breathing ? n + 1 : n;
        if (trunc.contains(gm, gn)) continue;
        for (int q1 = 0; q1 < (js.has_ion1() ? 2 : 1); ++q1) {
            if (std::abs(js.sector(q1, 1)[idx]) > 1e-10) {
                throw TruncationError("excited-state amplitude at |" + std::to_string(m) + "," + std::to_string(n) +
                                      "> couples outside the truncation");
            }
        }
    }
    return apply(jcm_operator(coupling, t, kind, trunc, mode), js);
}

/// Evenly spaced probe times covering coupling * t in [0, span], inclusive.
inline std::vector<double> uniform_times(double coupling, double span, std::size_t samples) {
    if (samples < 2) throw ArgumentError("need at least two samples");
    if (!(coupling > 0.0) || !(span > 0.0)) throw ArgumentError("coupling and span must be positive");
    std::vector<double> t(samples);
    for (std::size_t i = 0; i < samples; ++i) t[i] = span / coupling * static_cast<double>(i) / static_cast<double>(samples - 1);
    return t;
}

/// Ground-state probability of ion 2 from the closed-form signal.
inline SignalTrace signal(const MotionalState& s, double coupling, const std::vector<double>& times, JcmKind kind,
                          Mode mode = Mode::CenterOfMass) {
    detail::validate_times(times);
    const auto& trunc = s.truncation();
    // Collapse p_mn onto the frequencies the probe can see.
    std::map<int, double> weights;
    for (std::size_t idx = 0; idx < s.dim(); ++idx) {
        const auto [m, n] = trunc.mode_numbers(idx);
        weights[detail::jcm_coupling(kind, mode, m, n).quanta] += std::norm(s[idx]);
    }
    SignalTrace tr{times, std::vector<double>(times.size()), coupling, kind, mode};
    for (std::size_t i = 0; i < times.size(); ++i) {
        double acc = 0.0;
        for (const auto& [q, w] : weights) acc += w * std::cos(2.0 * coupling * times[i] * std::sqrt(static_cast<double>(q)));
        tr.values[i] = 0.5 * (1.0 + acc);
    }
    return tr;
}

/// Same signal obtained by evolving |g>_2 x s with the JCM propagator.
inline SignalTrace signal_by_dynamics(const MotionalState& s, double coupling, const std::vector<double>& times,
                                      JcmKind kind, Mode mode = Mode::CenterOfMass) {
    detail::validate_times(times);
    const auto js = JointState::product(std::nullopt, QubitState::ground(), s);
    SignalTrace tr{times, std::vector<double>(times.size()), coupling, kind, mode};
    for (std::size_t i = 0; i < times.size(); ++i) {
        tr.values[i] = ground_probability(jcm_propagate(js, coupling, times[i], kind, mode), Ion::Two);
    }
    return tr;
}

struct SingleReconstruction {
    std::vector<double> p;  // p_m, m = 0..m_max, sums to 1
    double residual = 0.0;  // rms misfit of P_g
};

struct LevelSetDistribution {
    std::map<int, double> q;  // k = m n -> probability
    double residual = 0.0;
};

namespace detail {

/// Fits 2 P_g - 1 = sum_k w_k cos(2 c t sqrt(k)), w >= 0, renormalised.
inline std::pair<std::vector<double>, double> fit_frequency_dictionary(const SignalTrace& tr, int k_max) {
    const auto rows = static_cast<Eigen::Index>(tr.times.size());
    Eigen::MatrixXd a(rows, k_max + 1);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        y(i) = 2.0 * tr.values[i] - 1.0;
        for (int k = 0; k <= k_max; ++k) a(i, k) = std::cos(2.0 * tr.coupling * tr.times[i] * std::sqrt(static_cast<double>(k)));
    }
    const auto sol = nnls(a, y);
    const double total = sol.x.sum();
    if (!(total > 0.0)) throw ArgumentError("reconstruction produced an all-zero distribution");
    std::vector<double> w(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) w[k] = sol.x(k) / total;
    return {w, 0.5 * sol.residual_norm / std::sqrt(static_cast<double>(rows))};
}

inline void check_trace(const SignalTrace& tr, int k_max, JcmKind want) {
    if (tr.kind != want) throw ArgumentError(std::string("trace kind must be ") + to_string(want));
    if (tr.times.size() != tr.values.size()) throw ArgumentError("trace times and values differ in length");
    if (k_max < 0) throw ArgumentError("dictionary size must be non-negative");
    if (tr.times.size() < 2 * (static_cast<std::size_t>(k_max) + 1)) {
        throw ArgumentError("need at least " + std::to_string(2 * (k_max + 1)) + " samples, trace has " +
                            std::to_string(tr.times.size()));
    }
}

}  // namespace detail

/// Phonon-number distribution of the probed mode from a single-mode trace.
inline SingleReconstruction reconstruct_single(const SignalTrace& tr, int m_max) {
    detail::check_trace(tr, m_max, JcmKind::Single);
    auto [p, residual] = detail::fit_frequency_dictionary(tr, m_max);
    return {std::move(p), residual};
}

/// Level-set distribution q_k from a two-mode trace.
inline LevelSetDistribution reconstruct_two(const SignalTrace& tr, int k_max) {
    detail::check_trace(tr, k_max, JcmKind::Two);
    auto [w, residual] = detail::fit_frequency_dictionary(tr, k_max);
    LevelSetDistribution out;
    for (int k = 0; k <= k_max; ++k) out.q[k] = w[k];
    out.residual = residual;
    return out;
}

/// Exact q_k = sum_{mn = k} p_mn of a state.
inline std::map<int, double> level_set_distribution(const MotionalState& s) {
    std::map<int, double> q;
    for (std::size_t idx = 0; idx < s.dim(); ++idx) {
        const auto [m, n] = s.truncation().mode_numbers(idx);
        q[m * n] += std::norm(s[idx]);
    }
    return q;
}

struct DirectEstimate {
    double sigma_x_exact = 0.0;        // from the simulated protocol
    double sigma_x_closed_form = 0.0;  // -<sin(2 chi t n)>
    double mean_n_linearized = 0.0;    // -sigma_x / (2 chi t)
    double chi_t = 0.0;
    Mode mode = Mode::CenterOfMass;
};

/// Direct readout of <n> for one mode. Runs the carrier pulse and the
/// conditional phase on |g>_2 x s and checks the result against the closed
/// form.
///
/// The carrier pulse is exp(-i pi/4 sigma_x), |g> -> (|g> - i|e>)/sqrt2; with
/// sigma_z|g> = -|g> this is the phase that gives <sigma_x> = -<sin(2 chi t n)>.
inline DirectEstimate direct_mean_phonon(const MotionalState& s, double chi, double t, Mode mode) {
    const double chi_t = chi * t;
    if (!(chi_t > 0.0)) throw ArgumentError("direct readout needs chi * t > 0");
    auto js = JointState::product(std::nullopt, QubitState::ground(), s);
    js = carrier_rotation(Ion::Two, kPi / 2.0, js);
    js = conditional_phase(mode, chi_t, js);
    DirectEstimate est;
    est.sigma_x_exact = expect_sigma_x(js, Ion::Two);
    const auto dist = number_distributions(s);
    const auto& marginal = mode == Mode::CenterOfMass ? dist.p_m : dist.p_n;
    double closed = 0.0;
    for (std::size_t q = 0; q < marginal.size(); ++q) closed -= marginal[q] * std::sin(2.0 * chi_t * static_cast<double>(q));
    est.sigma_x_closed_form = closed;
    if (std::abs(closed - est.sigma_x_exact) > 1e-12) {
        throw std::logic_error("direct readout protocol disagrees with its closed form");
    }
    est.chi_t = chi_t;
    est.mode = mode;
    est.mean_n_linearized = -est.sigma_x_exact / (2.0 * chi_t);
    return est;
}

struct JzMethodsConfig {
    double coupling = 1.0;         // lambda for the single-mode probe, rad/s
    double span = 8.0 * kPi;       // coupling * t range of the probe
    std::size_t samples = 256;
    int m_max = 16;
    double chi_t = 1e-3;
};

struct JzComparison {
    double exact = 0.0;
    double reconstructed = 0.0;
    double direct = 0.0;
    SingleReconstruction cm, breathing;
    DirectEstimate direct_cm, direct_breathing;

    double exact_vs_reconstructed() const { return std::abs(exact - reconstructed); }
    double exact_vs_direct() const { return std::abs(exact - direct); }
    double reconstructed_vs_direct() const { return std::abs(reconstructed - direct); }
};

/// <J_z> three ways: exact expectation, single-mode reconstruction of both
/// marginals, and the direct readout of both mean phonon numbers.
inline JzComparison jz_from_methods(const MotionalState& s, const JzMethodsConfig& cfg = {}) {
    JzComparison out;
    out.exact = expect(s, Observable::Jz);
    const auto times = uniform_times(cfg.coupling, cfg.span, cfg.samples);
    out.cm = reconstruct_single(signal(s, cfg.coupling, times, JcmKind::Single, Mode::CenterOfMass), cfg.m_max);
    out.breathing = reconstruct_single(signal(s, cfg.coupling, times, JcmKind::Single, Mode::Breathing), cfg.m_max);
    double mean_c = 0.0, mean_r = 0.0;
    for (int m = 0; m <= cfg.m_max; ++m) {
        mean_c += m * out.cm.p[m];
        mean_r += m * out.breathing.p[m];
    }
    out.reconstructed = 0.5 * (mean_c - mean_r);
    out.direct_cm = direct_mean_phonon(s, cfg.chi_t, 1.0, Mode::CenterOfMass);
    out.direct_breathing = direct_mean_phonon(s, cfg.chi_t, 1.0, Mode::Breathing);
    out.direct = 0.5 * (out.direct_cm.mean_n_linearized - out.direct_breathing.mean_n_linearized);
    return out;
}

// ---------------------------------------------------------------------------
// Dump formats.

/// Header "t,p_g".
inline void write_trace_csv(std::ostream& os, const SignalTrace& tr) {
    std::ostringstream buf;
    buf.precision(17);
    buf << "t,p_g\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) buf << tr.times[i] << ',' << tr.values[i] << '\n';
    os << buf.str();
}

inline nlohmann::json to_json(const SingleReconstruction& r) { return {{"p", r.p}, {"residual", r.residual}}; }

inline nlohmann::json to_json(const LevelSetDistribution& r) {
    nlohmann::json q = nlohmann::json::object();
    for (const auto& [k, p] : r.q) q[std::to_string(k)] = p;
    return {{"q", std::move(q)}, {"residual", r.residual}};
}

inline nlohmann::json to_json(const DirectEstimate& d) {
    return {{"mode", to_string(d.mode)},
            {"chi_t", d.chi_t},
            {"sigma_x_exact", d.sigma_x_exact},
            {"sigma_x_closed_form", d.sigma_x_closed_form},
            {"mean_n_linearized", d.mean_n_linearized}};
}

inline nlohmann::json to_json(const JzComparison& c) {
    return {{"exact", c.exact},
            {"reconstructed", c.reconstructed},
            {"direct", c.direct},
            {"deviation",
             {{"exact_vs_reconstructed", c.exact_vs_reconstructed()},
              {"exact_vs_direct", c.exact_vs_direct()},
              {"reconstructed_vs_direct", c.reconstructed_vs_direct()}}}};
}

}  // namespace phonon
