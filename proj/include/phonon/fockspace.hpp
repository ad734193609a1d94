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

// Two-mode motional states of a two-ion crystal in a truncated Fock space.
//
// The first mode is the centre-of-mass (c.m.) mode with ladder operators
// a, a+; the second is the breathing mode with b, b+. Basis states |m,n>
// are kept for m + n <= N_max ("triangular" truncation), so every block of
// fixed total phonon number N is complete and number-conserving operators
// act exactly on the retained space.
//
// Flat layout: blocks of constant N in increasing order, and inside a block
// increasing m. The index of |m,n> is N(N+1)/2 + m with N = m + n.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phonon/error.hpp"

namespace phonon {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Default probability that may be discarded by truncation before a state
/// is flagged.
inline constexpr double kDefaultTailTolerance = 1e-10;

enum class Mode { CenterOfMass, Breathing };
enum class Parity { Even, Odd };
enum class Ion { One, Two };

inline const char* to_string(Mode mode) { return mode == Mode::CenterOfMass ? "c" : "r"; }
inline const char* to_string(Parity parity) { return parity == Parity::Even ? "even" : "odd"; }

class Truncation {
   public:
    explicit Truncation(int n_total_max) : n_total_max_(n_total_max) {
        if (n_total_max < 0) {
            throw TruncationError("n_total_max must be non-negative, got " + std::to_string(n_total_max));
        }
    }

    int n_total_max() const { return n_total_max_; }

    std::size_t dim() const {
        const auto n = static_cast<std::size_t>(n_total_max_);
        return (n + 1) * (n + 2) / 2;
    }

    bool contains(int m, int n) const { return m >= 0 && n >= 0 && m + n <= n_total_max_; }

    /// First flat index of the total-number-N block.
    static std::size_t block_offset(int total) {
        const auto t = static_cast<std::size_t>(total);
        return t * (t + 1) / 2;
    }

    std::size_t index(int m, int n) const {
        if (!contains(m, n)) {
            throw TruncationError("basis state |" + std::to_string(m) + "," + std::to_string(n) +
                                  "> outside truncation m+n <= " + std::to_string(n_total_max_));
        }
        return block_offset(m + n) + static_cast<std::size_t>(m);
    }

    /// Inverse of index(): returns (m, n).
    std::pair<int, int> mode_numbers(std::size_t idx) const {
        auto total = static_cast<int>((std::sqrt(8.0 * static_cast<double>(idx) + 1.0) - 1.0) / 2.0);
        while (block_offset(total + 1) <= idx) ++total;
        while (block_offset(total) > idx) --total;
        const int m = static_cast<int>(idx - block_offset(total));
        return {m, total - m};
    }

    friend bool operator==(const Truncation&, const Truncation&) = default;

   private:
    int n_total_max_;
};

inline void require_same_truncation(const Truncation& a, const Truncation& b) {
    if (!(a == b)) {
        throw TruncationError("truncation mismatch: n_total_max " + std::to_string(a.n_total_max()) + " vs " +
                              std::to_string(b.n_total_max()));
    }
}

namespace detail {

inline double norm_squared(std::span<const cd> v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return s;
}

}  // namespace detail

/// Pure two-mode motional state. Amplitudes are unit-normalised on the
/// retained space; tail_mass records the probability dropped when the state
/// was built from an unbounded expansion.
class MotionalState {
   public:
    /// Renormalises amps. Throws on size mismatch or a zero vector.
    MotionalState(Truncation truncation, std::vector<cd> amps, double tail_mass = 0.0,
                  double tail_tolerance = kDefaultTailTolerance)
        : truncation_(truncation), amps_(std::move(amps)), tail_mass_(tail_mass) {
        if (amps_.size() != truncation_.dim()) {
            throw TruncationError("amplitude vector has " + std::to_string(amps_.size()) + " entries, truncation needs " +
                                  std::to_string(truncation_.dim()));
        }
        const double n2 = detail::norm_squared(amps_);
        if (!(n2 > 0.0) || !std::isfinite(n2)) throw ArgumentError("motional state has zero or non-finite norm");
        const double scale = 1.0 / std::sqrt(n2);
        for (auto& c : amps_) c *= scale;
        if (tail_mass_ < 0.0) tail_mass_ = 0.0;
        flagged_ = tail_mass_ > tail_tolerance;
    }

    const Truncation& truncation() const { return truncation_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cd> amplitudes() const { return amps_; }
    cd amplitude(int m, int n) const { return amps_[truncation_.index(m, n)]; }
    cd operator[](std::size_t idx) const { return amps_[idx]; }

    double tail_mass() const { return tail_mass_; }
    /// True when the discarded probability exceeded the tolerance in force at
    /// construction. The state stays usable.
    bool truncation_flagged() const { return flagged_; }

    /// Same truncation, tail mass and flag; new (renormalised) amplitudes.
    MotionalState with_amplitudes(std::vector<cd> amps) const {
        MotionalState s(truncation_, std::move(amps), tail_mass_);
        s.flagged_ = flagged_;
        return s;
    }

   private:
    Truncation truncation_;
    std::vector<cd> amps_;
    double tail_mass_ = 0.0;
    bool flagged_ = false;
};

// ---------------------------------------------------------------------------
// Single-mode amplitude tables (exactly normalised on the infinite space).

/// e^{-|alpha|^2/2} alpha^k / sqrt(k!) for k = 0..k_max.
inline std::vector<cd> coherent_amplitudes(cd alpha, int k_max) {
    std::vector<cd> out(static_cast<std::size_t>(k_max) + 1);
    out[0] = std::exp(-0.5 * std::norm(alpha));
    for (int k = 1; k <= k_max; ++k) out[k] = out[k - 1] * alpha / std::sqrt(static_cast<double>(k));
    return out;
}

/// N_(+/-) (|alpha> +/- |-alpha>) expanded to k_max, N_(+/-) = [2(1 +/- e^{-2|alpha|^2})]^{-1/2}.
inline std::vector<cd> cat_amplitudes(cd alpha, Parity parity, int k_max) {
    const double a2 = std::norm(alpha);
    // 1 - e^{-2|a|^2} loses all digits near alpha = 0 unless taken through expm1.
    const double bracket = parity == Parity::Even ? 2.0 - (-std::expm1(-2.0 * a2)) : -std::expm1(-2.0 * a2);
    if (!(bracket > 0.0)) throw ArgumentError("odd cat state with alpha = 0 is the zero vector");
    const double norm = 1.0 / std::sqrt(2.0 * bracket);
    auto out = coherent_amplitudes(alpha, k_max);
    for (int k = 0; k <= k_max; ++k) {
        const bool keep = (k % 2 == 0) == (parity == Parity::Even);
        out[k] = keep ? 2.0 * norm * out[k] : cd{0.0, 0.0};
    }
    return out;
}

/// Product state c_m r_n restricted to m + n <= N_max. Both tables must be
/// normalised on the full line; the discarded product weight is the tail.
inline MotionalState make_product(std::span<const cd> cm_amps, std::span<const cd> br_amps, Truncation trunc,
                                  double tail_tolerance = kDefaultTailTolerance) {
    const int nmax = trunc.n_total_max();
    if (cm_amps.size() < static_cast<std::size_t>(nmax) + 1 || br_amps.size() < static_cast<std::size_t>(nmax) + 1) {
        throw TruncationError("single-mode amplitude tables shorter than n_total_max + 1");
    }
    std::vector<cd> amps(trunc.dim());
    double kept = 0.0;
    for (int total = 0; total <= nmax; ++total) {
        for (int m = 0; m <= total; ++m) {
            const cd c = cm_amps[m] * br_amps[total - m];
            amps[Truncation::block_offset(total) + m] = c;
            kept += std::norm(c);
        }
    }
    return MotionalState(trunc, std::move(amps), 1.0 - kept, tail_tolerance);
}

inline MotionalState make_fock(int m, int n, Truncation trunc) {
    if (!trunc.contains(m, n)) {
        throw TruncationError("Fock state |" + std::to_string(m) + "," + std::to_string(n) +
                              "> needs m,n >= 0 and m+n <= " + std::to_string(trunc.n_total_max()));
    }
    std::vector<cd> amps(trunc.dim());
    amps[trunc.index(m, n)] = 1.0;
    return MotionalState(trunc, std::move(amps));
}

inline MotionalState make_vacuum(Truncation trunc) { return make_fock(0, 0, trunc); }

/// |alpha>_c |beta>_r.
inline MotionalState make_coherent(cd alpha, cd beta, Truncation trunc,
                                   double tail_tolerance = kDefaultTailTolerance) {
    const int nmax = trunc.n_total_max();
    const auto ca = coherent_amplitudes(alpha, nmax);
    const auto cb = coherent_amplitudes(beta, nmax);
    return make_product(ca, cb, trunc, tail_tolerance);
}

/// Cat state in the chosen mode, vacuum in the other.
inline MotionalState make_cat(cd alpha, Parity parity, Mode mode, Truncation trunc,
                              double tail_tolerance = kDefaultTailTolerance) {
    const int nmax = trunc.n_total_max();
    const auto cat = cat_amplitudes(alpha, parity, nmax);
    std::vector<cd> vac(static_cast<std::size_t>(nmax) + 1);
    vac[0] = 1.0;
    return mode == Mode::CenterOfMass ? make_product(cat, vac, trunc, tail_tolerance)
                                      : make_product(vac, cat, trunc, tail_tolerance);
}

inline cd inner(const MotionalState& a, const MotionalState& b) {
    require_same_truncation(a.truncation(), b.truncation());
    cd s{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double fidelity(const MotionalState& a, const MotionalState& b) { return std::norm(inner(a, b)); }

// ---------------------------------------------------------------------------
// Number statistics and expectation values.

struct JointDistribution {
    Truncation truncation{0};
    std::vector<double> p_mn;  // flat layout
    std::vector<double> p_m;   // c.m. marginal, index m
    std::vector<double> p_n;   // breathing marginal, index n
    double mean_Jz = 0.0;

    double p(int m, int n) const { return p_mn[truncation.index(m, n)]; }
};

inline JointDistribution number_distributions(const MotionalState& s) {
    const auto& trunc = s.truncation();
    const int nmax = trunc.n_total_max();
    JointDistribution d;
    d.truncation = trunc;
    d.p_mn.resize(s.dim());
    d.p_m.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
    d.p_n.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
    for (int total = 0; total <= nmax; ++total) {
        for (int m = 0; m <= total; ++m) {
            const std::size_t idx = Truncation::block_offset(total) + m;
            const double p = std::norm(s[idx]);
            d.p_mn[idx] = p;
            d.p_m[m] += p;
            d.p_n[total - m] += p;
        }
    }
    double mean_m = 0.0, mean_n = 0.0;
    for (int k = 0; k <= nmax; ++k) {
        mean_m += k * d.p_m[k];
        mean_n += k * d.p_n[k];
    }
    d.mean_Jz = 0.5 * (mean_m - mean_n);
    return d;
}

enum class Observable { Jx, Jy, Jz, Jz2, Nc, Nr };

inline const char* to_string(Observable o) {
    switch (o) {
        case Observable::Jx: return "Jx";
        case Observable::Jy: return "Jy";
        case Observable::Jz: return "Jz";
        case Observable::Jz2: return "Jz2";
        case Observable::Nc: return "Nc";
        case Observable::Nr: return "Nr";
    }
    return "?";
}

namespace detail {

/// <s| a+ b |s> = sum conj(c_{m+1,n-1}) sqrt((m+1) n) c_{mn}.
inline cd mean_adag_b(const MotionalState& s) {
    const int nmax = s.truncation().n_total_max();
    cd acc{0.0, 0.0};
    for (int total = 1; total <= nmax; ++total) {
        const std::size_t off = Truncation::block_offset(total);
        for (int m = 0; m < total; ++m) {
            const int n = total - m;
            acc += std::conj(s[off + m + 1]) * std::sqrt(static_cast<double>((m + 1) * n)) * s[off + m];
        }
    }
    return acc;
}

}  // namespace detail

/// <s|O|s> for the Schwinger operators J_x = (a+b + ab+)/2, J_y = (a+b - ab+)/2i,
/// J_z = (a+a - b+b)/2, J_z^2 and the two number operators.
inline double expect(const MotionalState& s, Observable obs) {
    switch (obs) {
        case Observable::Jx: return detail::mean_adag_b(s).real();
        case Observable::Jy: return detail::mean_adag_b(s).imag();
        default: break;
    }
    const int nmax = s.truncation().n_total_max();
    double acc = 0.0;
    for (int total = 0; total <= nmax; ++total) {
        const std::size_t off = Truncation::block_offset(total);
        for (int m = 0; m <= total; ++m) {
            const int n = total - m;
            const double p = std::norm(s[off + m]);
            const double jz = 0.5 * (m - n);
            switch (obs) {
                case Observable::Jz: acc += p * jz; break;
                case Observable::Jz2: acc += p * jz * jz; break;
                case Observable::Nc: acc += p * m; break;
                case Observable::Nr: acc += p * n; break;
                default: break;
            }
        }
    }
    return acc;
}

/// Reduced purity Tr(rho_c^2) of the c.m. mode.
inline double reduced_purity(const MotionalState& s) {
    const int nmax = s.truncation().n_total_max();
    const auto& tr = s.truncation();
    double purity = 0.0;
    for (int m1 = 0; m1 <= nmax; ++m1) {
        for (int m2 = 0; m2 <= nmax; ++m2) {
            cd rho{0.0, 0.0};
            for (int n = 0; n + std::max(m1, m2) <= nmax; ++n) rho += s[tr.index(m1, n)] * std::conj(s[tr.index(m2, n)]);
            purity += std::norm(rho);
        }
    }
    return purity;
}

// ---------------------------------------------------------------------------
// Internal (qubit) states and ion-motion joint states.

/// Ion internal state a_g |g> + a_e |e>, sigma_z |g> = -|g>, sigma_z |e> = +|e>.
class QubitState {
   public:
    QubitState(cd g, cd e) : g_(g), e_(e) {
        const double n2 = std::norm(g) + std::norm(e);
        if (!(n2 > 0.0)) throw ArgumentError("qubit state has zero norm");
        const double s = 1.0 / std::sqrt(n2);
        g_ *= s;
        e_ *= s;
    }
    static QubitState ground() { return {1.0, 0.0}; }
    static QubitState excited() { return {0.0, 1.0}; }
    /// sigma_x = +1 eigenstate (|g> + |e>)/sqrt(2).
    static QubitState plus_x() { return {1.0, 1.0}; }
    /// sigma_x = -1 eigenstate (|e> - |g>)/sqrt(2).
    static QubitState minus_x() { return {-1.0, 1.0}; }

    cd g() const { return g_; }
    cd e() const { return e_; }
    cd operator[](int q) const { return q == 0 ? g_ : e_; }

   private:
    cd g_, e_;
};

inline double qubit_overlap_squared(const QubitState& a, const QubitState& b) {
    return std::norm(std::conj(a.g()) * b.g() + std::conj(a.e()) * b.e());
}

/// Qubit register(s) tensored with a motional state. Ions that are not part of
/// the register are absent rather than implicit. Amplitude layout is
/// [q1][q2][motional index] with q = 0 for |g>, 1 for |e>; absent ions
/// contribute no index.
class JointState {
   public:
    JointState(bool has_ion1, bool has_ion2, Truncation truncation, std::vector<cd> amps, double tail_mass = 0.0)
        : has_ion1_(has_ion1), has_ion2_(has_ion2), truncation_(truncation), amps_(std::move(amps)),
          tail_mass_(tail_mass) {
        if (amps_.size() != sectors() * truncation_.dim()) {
            throw TruncationError("joint amplitude vector has wrong size");
        }
        const double n2 = detail::norm_squared(amps_);
        if (!(n2 > 0.0)) throw ArgumentError("joint state has zero norm");
        const double s = 1.0 / std::sqrt(n2);
        for (auto& c : amps_) c *= s;
    }

    static JointState product(std::optional<QubitState> ion1, std::optional<QubitState> ion2,
                              const MotionalState& motion) {
        const bool h1 = ion1.has_value(), h2 = ion2.has_value();
        const std::size_t d = motion.dim();
        const std::size_t s1 = h1 ? 2 : 1, s2 = h2 ? 2 : 1;
        std::vector<cd> amps(s1 * s2 * d);
        for (std::size_t q1 = 0; q1 < s1; ++q1) {
            for (std::size_t q2 = 0; q2 < s2; ++q2) {
                const cd w = (h1 ? (*ion1)[static_cast<int>(q1)] : cd{1.0}) * (h2 ? (*ion2)[static_cast<int>(q2)] : cd{1.0});
                const std::size_t off = (q1 * s2 + q2) * d;
                for (std::size_t k = 0; k < d; ++k) amps[off + k] = w * motion[k];
            }
        }
        return JointState(h1, h2, motion.truncation(), std::move(amps), motion.tail_mass());
    }

    bool has_ion1() const { return has_ion1_; }
    bool has_ion2() const { return has_ion2_; }
    bool has_ion(Ion ion) const { return ion == Ion::One ? has_ion1_ : has_ion2_; }
    int qubit_count() const { return int{has_ion1_} + int{has_ion2_}; }
    const Truncation& truncation() const { return truncation_; }
    std::size_t motional_dim() const { return truncation_.dim(); }
    std::size_t sectors() const { return (has_ion1_ ? 2u : 1u) * (has_ion2_ ? 2u : 1u); }
    double tail_mass() const { return tail_mass_; }
    std::span<const cd> amplitudes() const { return amps_; }

    /// Offset of the motional block for internal state (q1, q2); q must be 0
    /// for an absent ion.
    std::size_t sector_offset(int q1, int q2) const {
        if ((!has_ion1_ && q1 != 0) || (!has_ion2_ && q2 != 0) || q1 < 0 || q1 > 1 || q2 < 0 || q2 > 1) {
            throw RegisterError("internal index refers to an absent ion");
        }
        const std::size_t s2 = has_ion2_ ? 2 : 1;
        return (static_cast<std::size_t>(q1) * s2 + static_cast<std::size_t>(q2)) * truncation_.dim();
    }

    std::span<const cd> sector(int q1, int q2) const {
        return std::span<const cd>(amps_).subspan(sector_offset(q1, q2), truncation_.dim());
    }

   private:
    bool has_ion1_, has_ion2_;
    Truncation truncation_;
    std::vector<cd> amps_;
    double tail_mass_;
};

inline void require_ion(const JointState& js, Ion ion) {
    if (!js.has_ion(ion)) {
        throw RegisterError(ion == Ion::One ? "operation needs the ion-1 qubit register"
                                            : "operation needs the ion-2 qubit register");
    }
}

/// 2x2 reduced density matrix rho[i][j] = <i|rho|j> of one ion (0 = g, 1 = e).
struct QubitDensity {
    cd rho[2][2];
};

inline QubitDensity reduced_qubit(const JointState& js, Ion ion) {
    require_ion(js, ion);
    QubitDensity out{};
    const std::size_t d = js.motional_dim();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            cd acc{0.0, 0.0};
            for (int other = 0; other < (js.has_ion(ion == Ion::One ? Ion::Two : Ion::One) ? 2 : 1); ++other) {
                const auto a = ion == Ion::One ? js.sector(i, other) : js.sector(other, i);
                const auto b = ion == Ion::One ? js.sector(j, other) : js.sector(other, j);
                for (std::size_t k = 0; k < d; ++k) acc += a[k] * std::conj(b[k]);
            }
            out.rho[i][j] = acc;
        }
    }
    return out;
}

/// <q| rho_ion |q>.
inline double qubit_fidelity(const JointState& js, Ion ion, const QubitState& q) {
    const auto r = reduced_qubit(js, ion);
    cd acc{0.0, 0.0};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) acc += std::conj(q[i]) * r.rho[i][j] * q[j];
    return acc.real();
}

inline double ground_probability(const JointState& js, Ion ion) { return reduced_qubit(js, ion).rho[0][0].real(); }

/// <sigma_x> = 2 Re rho_eg.
inline double expect_sigma_x(const JointState& js, Ion ion) { return 2.0 * reduced_qubit(js, ion).rho[1][0].real(); }

/// Motional state conditioned on projecting the present ions onto the given
/// internal states; returns the normalised motional state and the
/// projection probability.
inline std::pair<MotionalState, double> project_motion(const JointState& js, std::optional<QubitState> ion1,
                                                      std::optional<QubitState> ion2) {
    if (js.has_ion1() != ion1.has_value() || js.has_ion2() != ion2.has_value()) {
        throw RegisterError("projection must name exactly the ions present in the register");
    }
    const std::size_t d = js.motional_dim();
    std::vector<cd> out(d);
    for (int q1 = 0; q1 < (js.has_ion1() ? 2 : 1); ++q1) {
        for (int q2 = 0; q2 < (js.has_ion2() ? 2 : 1); ++q2) {
            const cd w = (ion1 ? std::conj((*ion1)[q1]) : cd{1.0}) * (ion2 ? std::conj((*ion2)[q2]) : cd{1.0});
            const auto sec = js.sector(q1, q2);
            for (std::size_t k = 0; k < d; ++k) out[k] += w * sec[k];
        }
    }
    const double prob = detail::norm_squared(out);
    return {MotionalState(js.truncation(), std::move(out), js.tail_mass()), prob};
}

// ---------------------------------------------------------------------------
// Dump formats.

/// {"n_total_max": int, "amps": [[m, n, re, im], ...], "tail_mass": float}
inline nlohmann::json to_json(const MotionalState& s) {
    nlohmann::json amps = nlohmann::json::array();
    for (std::size_t i = 0; i < s.dim(); ++i) {
        const auto [m, n] = s.truncation().mode_numbers(i);
        amps.push_back({m, n, s[i].real(), s[i].imag()});
    }
    return {{"n_total_max", s.truncation().n_total_max()}, {"amps", std::move(amps)}, {"tail_mass", s.tail_mass()}};
}

/// Inverse of to_json. Basis states missing from "amps" have amplitude zero.
inline MotionalState motional_state_from_json(const nlohmann::json& j) {
    const Truncation trunc(j.at("n_total_max").get<int>());
    std::vector<cd> amps(trunc.dim());
    for (const auto& row : j.at("amps")) {
        const int m = row.at(0).get<int>(), n = row.at(1).get<int>();
        amps[trunc.index(m, n)] = cd{row.at(2).get<double>(), row.at(3).get<double>()};
    }
    return MotionalState(trunc, std::move(amps), j.value("tail_mass", 0.0));
}

/// CSV with header "m,n,p", one row per retained basis state.
inline void write_distribution_csv(std::ostream& os, const JointDistribution& d) {
    std::ostringstream buf;
    buf.precision(17);
    buf << "m,n,p\n";
    for (std::size_t i = 0; i < d.p_mn.size(); ++i) {
        const auto [m, n] = d.truncation.mode_numbers(i);
        buf << m << ',' << n << ',' << d.p_mn[i] << '\n';
    }
    os << buf.str();
}

}  // namespace phonon
