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

// Unitaries of the two-mode phonon toolbox.
//
// Sign conventions (both coexist on purpose):
//   beam splitters   B1(theta) = exp(-i theta J_x), B2(theta) = exp(-i theta J_y)
//   phase shifters   P_c(phi)  = exp(+i phi a+a),   P_r(phi)  = exp(+i phi b+b)
// A dense oracle exp(-i H t) is provided for tests; production paths build
// every operator block by block.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <json.hpp>

#include "phonon/error.hpp"
#include "phonon/fockspace.hpp"

namespace phonon {

enum class BeamSplitterKind { B1, B2 };

enum class OperatorKind { BlockNumberConserving, DiagonalPhase, JcmBlock, Dense };

inline const char* to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::BlockNumberConserving: return "block-number-conserving";
        case OperatorKind::DiagonalPhase: return "diagonal-phase";
        case OperatorKind::JcmBlock: return "jcm-block";
        case OperatorKind::Dense: return "dense";
    }
    return "?";
}

/// A dense unitary acting on the listed flat indices of the operator's space.
/// label is the conserved quantum number of the block (total phonon number
/// for number-conserving kinds).
struct OperatorBlock {
    int label = 0;
    std::vector<std::size_t> support;
    Eigen::MatrixXcd matrix;
};

/// Block-structured unitary. Indices not covered by any block are left
/// unchanged. Motional kinds act on the motional space of `truncation`;
/// jcm-block operators act on (ion-2 qubit) x (motion), index q * dim + k.
class UnitaryOperator {
   public:
    UnitaryOperator(OperatorKind kind, Truncation truncation, std::size_t space_dim, std::vector<OperatorBlock> blocks)
        : kind_(kind), truncation_(truncation), space_dim_(space_dim), blocks_(std::move(blocks)) {}

    OperatorKind kind() const { return kind_; }
    const Truncation& truncation() const { return truncation_; }
    std::size_t space_dim() const { return space_dim_; }
    const std::vector<OperatorBlock>& blocks() const { return blocks_; }

    /// max over blocks of max |B^dagger B - I|.
    double max_unitarity_error() const {
        double worst = 0.0;
        for (const auto& b : blocks_) {
            const auto n = b.matrix.rows();
            const Eigen::MatrixXcd d = b.matrix.adjoint() * b.matrix - Eigen::MatrixXcd::Identity(n, n);
            worst = std::max(worst, d.cwiseAbs().maxCoeff());
        }
        return worst;
    }

    Eigen::MatrixXcd to_dense() const {
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(space_dim_),
                                                        static_cast<Eigen::Index>(space_dim_));
        for (const auto& b : blocks_) {
            for (std::size_t i = 0; i < b.support.size(); ++i) {
                for (std::size_t j = 0; j < b.support.size(); ++j) {
                    u(static_cast<Eigen::Index>(b.support[i]), static_cast<Eigen::Index>(b.support[j])) =
                        b.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                }
            }
        }
        return u;
    }

    /// out = U in, both of length space_dim.
    void apply_to(std::span<const cd> in, std::span<cd> out) const {
        if (in.size() != space_dim_ || out.size() != space_dim_) {
            throw TruncationError("operator of dimension " + std::to_string(space_dim_) + " applied to vector of " +
                                  std::to_string(in.size()));
        }
        std::copy(in.begin(), in.end(), out.begin());
        Eigen::VectorXcd x, y;
        for (const auto& b : blocks_) {
            const auto n = static_cast<Eigen::Index>(b.support.size());
            if (kind_ == OperatorKind::DiagonalPhase) {
                for (Eigen::Index i = 0; i < n; ++i) out[b.support[i]] = b.matrix(i, i) * in[b.support[i]];
                continue;
            }
            x.resize(n);
            for (Eigen::Index i = 0; i < n; ++i) x(i) = in[b.support[i]];
            y.noalias() = b.matrix * x;
            for (Eigen::Index i = 0; i < n; ++i) out[b.support[i]] = y(i);
        }
    }

   private:
    OperatorKind kind_;
    Truncation truncation_;
    std::size_t space_dim_;
    std::vector<OperatorBlock> blocks_;
};

namespace detail {

inline std::vector<std::size_t> block_support(int total) {
    std::vector<std::size_t> s(static_cast<std::size_t>(total) + 1);
    for (int m = 0; m <= total; ++m) s[m] = Truncation::block_offset(total) + m;
    return s;
}

/// Generator restricted to the total-number-N block, basis m = 0..N.
/// <m+1, n-1| a+b |m, n> = sqrt((m+1) n).
inline Eigen::MatrixXcd beam_splitter_generator(BeamSplitterKind kind, int total) {
    const Eigen::Index d = total + 1;
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(d, d);
    for (int m = 0; m < total; ++m) {
        const double amp = 0.5 * std::sqrt(static_cast<double>((m + 1) * (total - m)));
        // J_x = (a+b + ab+)/2 ; J_y = (a+b - ab+)/2i
        const cd up = kind == BeamSplitterKind::B1 ? cd{amp, 0.0} : cd{0.0, -amp};
        g(m + 1, m) = up;
        g(m, m + 1) = std::conj(up);
    }
    return g;
}

/// exp(-i theta G) for Hermitian G by eigendecomposition.
inline Eigen::MatrixXcd hermitian_rotation(const Eigen::MatrixXcd& g, double theta) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    const Eigen::VectorXd& w = es.eigenvalues();
    const Eigen::MatrixXcd& v = es.eigenvectors();
    Eigen::VectorXcd phases(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::polar(1.0, -theta * w(i));
    return v * phases.asDiagonal() * v.adjoint();
}

}  // namespace detail

/// B1(theta) = exp(-i theta J_x) or B2(theta) = exp(-i theta J_y). Each
/// N-phonon block is the spin-N/2 rotation built from the block generator.
inline UnitaryOperator beam_splitter(BeamSplitterKind kind, double theta, Truncation trunc) {
    std::vector<OperatorBlock> blocks;
    blocks.reserve(static_cast<std::size_t>(trunc.n_total_max()) + 1);
    for (int total = 0; total <= trunc.n_total_max(); ++total) {
        blocks.push_back({total, detail::block_support(total),
                          detail::hermitian_rotation(detail::beam_splitter_generator(kind, total), theta)});
    }
    return UnitaryOperator(OperatorKind::BlockNumberConserving, trunc, trunc.dim(), std::move(blocks));
}

/// P_c(phi) = exp(i phi a+a) or P_r(phi) = exp(i phi b+b).
inline UnitaryOperator phase_shifter(Mode mode, double phi, Truncation trunc) {
    std::vector<OperatorBlock> blocks;
    for (int total = 0; total <= trunc.n_total_max(); ++total) {
        Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(total + 1, total + 1);
        for (int m = 0; m <= total; ++m) {
            const int quanta = mode == Mode::CenterOfMass ? m : total - m;
            d(m, m) = std::polar(1.0, phi * quanta);
        }
        blocks.push_back({total, detail::block_support(total), std::move(d)});
    }
    return UnitaryOperator(OperatorKind::DiagonalPhase, trunc, trunc.dim(), std::move(blocks));
}

inline MotionalState apply(const UnitaryOperator& u, const MotionalState& s) {
    require_same_truncation(u.truncation(), s.truncation());
    if (u.space_dim() != s.dim()) throw TruncationError("operator does not act on the motional space");
    std::vector<cd> out(s.dim());
    u.apply_to(s.amplitudes(), out);
    return s.with_amplitudes(std::move(out));
}

/// Motional operator applied to every internal sector (U x 1), or a
/// jcm-block operator applied to (ion 2) x motion with ion 1 as spectator.
inline JointState apply(const UnitaryOperator& u, const JointState& js) {
    require_same_truncation(u.truncation(), js.truncation());
    const std::size_t d = js.motional_dim();
    std::vector<cd> out(js.amplitudes().size());
    const auto in = js.amplitudes();
    if (u.kind() == OperatorKind::JcmBlock) {
        require_ion(js, Ion::Two);
        for (int q1 = 0; q1 < (js.has_ion1() ? 2 : 1); ++q1) {
            const std::size_t off = js.sector_offset(q1, 0);
            u.apply_to(in.subspan(off, 2 * d), std::span<cd>(out).subspan(off, 2 * d));
        }
    } else {
        if (u.space_dim() != d) throw TruncationError("operator does not act on the motional space");
        for (std::size_t s = 0; s < js.sectors(); ++s) {
            u.apply_to(in.subspan(s * d, d), std::span<cd>(out).subspan(s * d, d));
        }
    }
    return JointState(js.has_ion1(), js.has_ion2(), js.truncation(), std::move(out), js.tail_mass());
}

/// U1 = exp(-i theta J_x sigma_x1) (kind B1) or U2 = exp(-i theta J_y sigma_x1)
/// (kind B2), theta = 2 Omega eta eta_r t. Evaluated in the sigma_x1
/// eigenbasis: the +1 component receives B(theta), the -1 component B(-theta).
inline JointState joint_bs_propagator(BeamSplitterKind kind, double theta, const JointState& js) {
    require_ion(js, Ion::One);
    const auto forward = beam_splitter(kind, theta, js.truncation());
    const auto backward = beam_splitter(kind, -theta, js.truncation());
    const std::size_t d = js.motional_dim();
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<cd> out(js.amplitudes().size());
    std::vector<cd> plus(d), minus(d), plus_out(d), minus_out(d);
    for (int q2 = 0; q2 < (js.has_ion2() ? 2 : 1); ++q2) {
        const auto g = js.sector(0, q2);
        const auto e = js.sector(1, q2);
        for (std::size_t k = 0; k < d; ++k) {
            plus[k] = r * (g[k] + e[k]);   // along (|g> + |e>)/sqrt2
            minus[k] = r * (g[k] - e[k]);  // along (|g> - |e>)/sqrt2
        }
        forward.apply_to(plus, plus_out);
        backward.apply_to(minus, minus_out);
        const std::size_t og = js.sector_offset(0, q2), oe = js.sector_offset(1, q2);
        for (std::size_t k = 0; k < d; ++k) {
            out[og + k] = r * (plus_out[k] + minus_out[k]);
            out[oe + k] = r * (plus_out[k] - minus_out[k]);
        }
    }
    return JointState(js.has_ion1(), js.has_ion2(), js.truncation(), std::move(out), js.tail_mass());
}

/// U3 = exp[-i chi t a+a (sigma_z2 + 1/2)] (mode c) or U4 with b+b (mode r).
/// |g>_2 picks up exp(+i chi_t/2 * quanta), |e>_2 exp(-i 3 chi_t/2 * quanta).
inline JointState conditional_phase(Mode mode, double chi_t, const JointState& js) {
    require_ion(js, Ion::Two);
    const auto& trunc = js.truncation();
    std::vector<cd> out(js.amplitudes().begin(), js.amplitudes().end());
    for (int q1 = 0; q1 < (js.has_ion1() ? 2 : 1); ++q1) {
        for (int q2 = 0; q2 < 2; ++q2) {
            const double eigen = q2 == 0 ? -0.5 : 1.5;  // sigma_z + 1/2
            const std::size_t off = js.sector_offset(q1, q2);
            for (int total = 0; total <= trunc.n_total_max(); ++total) {
                for (int m = 0; m <= total; ++m) {
                    const int quanta = mode == Mode::CenterOfMass ? m : total - m;
                    out[off + Truncation::block_offset(total) + m] *= std::polar(1.0, -chi_t * quanta * eigen);
                }
            }
        }
    }
    return JointState(js.has_ion1(), js.has_ion2(), trunc, std::move(out), js.tail_mass());
}

/// Single-qubit carrier rotation exp(-i (angle/2) sigma_x) on one ion. The
/// pi/2 pulse takes |g> to (|g> - i|e>)/sqrt2.
inline JointState carrier_rotation(Ion ion, double angle, const JointState& js) {
    require_ion(js, ion);
    const double c = std::cos(0.5 * angle);
    const cd s{0.0, -std::sin(0.5 * angle)};
    std::vector<cd> out(js.amplitudes().size());
    const std::size_t d = js.motional_dim();
    const int other_count = js.has_ion(ion == Ion::One ? Ion::Two : Ion::One) ? 2 : 1;
    for (int o = 0; o < other_count; ++o) {
        const std::size_t og = ion == Ion::One ? js.sector_offset(0, o) : js.sector_offset(o, 0);
        const std::size_t oe = ion == Ion::One ? js.sector_offset(1, o) : js.sector_offset(o, 1);
        const auto in = js.amplitudes();
        for (std::size_t k = 0; k < d; ++k) {
            out[og + k] = c * in[og + k] + s * in[oe + k];
            out[oe + k] = s * in[og + k] + c * in[oe + k];
        }
    }
    return JointState(js.has_ion1(), js.has_ion2(), js.truncation(), std::move(out), js.tail_mass());
}

// ---------------------------------------------------------------------------
// Dense matrices and the matrix-exponential oracle (test-scale only).

inline constexpr Eigen::Index kOracleDimensionCap = 512;

/// Truncated annihilation operator of one mode: a|m,n> = sqrt(m)|m-1,n>.
inline Eigen::MatrixXcd ladder_matrix(Mode mode, Truncation trunc) {
    const auto d = static_cast<Eigen::Index>(trunc.dim());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const auto [m, n] = trunc.mode_numbers(static_cast<std::size_t>(i));
        if (mode == Mode::CenterOfMass && m > 0) a(static_cast<Eigen::Index>(trunc.index(m - 1, n)), i) = std::sqrt(m);
        if (mode == Mode::Breathing && n > 0) a(static_cast<Eigen::Index>(trunc.index(m, n - 1)), i) = std::sqrt(n);
    }
    return a;
}

/// Observable assembled from truncated ladder matrices.
inline Eigen::MatrixXcd dense_observable(Observable obs, Truncation trunc) {
    const Eigen::MatrixXcd a = ladder_matrix(Mode::CenterOfMass, trunc);
    const Eigen::MatrixXcd b = ladder_matrix(Mode::Breathing, trunc);
    const Eigen::MatrixXcd adag_b = a.adjoint() * b;
    const Eigen::MatrixXcd a_bdag = a * b.adjoint();
    const Eigen::MatrixXcd nc = a.adjoint() * a;
    const Eigen::MatrixXcd nr = b.adjoint() * b;
    const cd i{0.0, 1.0};
    switch (obs) {
        case Observable::Jx: return 0.5 * (adag_b + a_bdag);
        case Observable::Jy: return (adag_b - a_bdag) / (2.0 * i);
        case Observable::Jz: return 0.5 * (nc - nr);
        case Observable::Jz2: {
            const Eigen::MatrixXcd jz = 0.5 * (nc - nr);
            return jz * jz;
        }
        case Observable::Nc: return nc;
        case Observable::Nr: return nr;
    }
    return {};
}

enum class GeneratorKind { Hermitian, AntiHermitian };

/// Dense exp(-i H t) (Hermitian H) or exp(G t) (anti-Hermitian G), computed
/// by Pade scaling-and-squaring. Throws above the dimension cap or when the
/// generator has neither symmetry.
inline UnitaryOperator expm_oracle(const Eigen::MatrixXcd& generator, double t, Truncation trunc,
                                   GeneratorKind kind = GeneratorKind::Hermitian,
                                   Eigen::Index cap = kOracleDimensionCap) {
    if (generator.rows() != generator.cols()) throw ArgumentError("oracle generator must be square");
    if (generator.rows() > cap) {
        throw ArgumentError("oracle dimension " + std::to_string(generator.rows()) + " exceeds cap " +
                            std::to_string(cap));
    }
    if (generator.rows() % static_cast<Eigen::Index>(trunc.dim()) != 0) {
        throw TruncationError("oracle generator dimension is not a multiple of the motional dimension");
    }
    const double sign = kind == GeneratorKind::Hermitian ? 1.0 : -1.0;
    const double asym = (generator - sign * generator.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, generator.cwiseAbs().maxCoeff())) {
        throw ArgumentError(kind == GeneratorKind::Hermitian ? "oracle generator is not Hermitian"
                                                             : "oracle generator is not anti-Hermitian");
    }
    const Eigen::MatrixXcd exponent =
        kind == GeneratorKind::Hermitian ? Eigen::MatrixXcd(cd{0.0, -t} * generator) : Eigen::MatrixXcd(t * generator);
    Eigen::MatrixXcd u = exponent.exp();
    std::vector<std::size_t> support(static_cast<std::size_t>(u.rows()));
    for (std::size_t k = 0; k < support.size(); ++k) support[k] = k;
    const auto dim = support.size();
    return UnitaryOperator(OperatorKind::Dense, trunc, dim, {OperatorBlock{-1, std::move(support), std::move(u)}});
}

/// Debug dump {"kind", "n_total_max", "blocks": [{"N", "dim", "matrix": [[re, im], ...]}]}
/// with each matrix flattened row-major. Not a stable format.
inline nlohmann::json to_json(const UnitaryOperator& u) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : u.blocks()) {
        nlohmann::json m = nlohmann::json::array();
        for (Eigen::Index i = 0; i < b.matrix.rows(); ++i)
            for (Eigen::Index j = 0; j < b.matrix.cols(); ++j) m.push_back({b.matrix(i, j).real(), b.matrix(i, j).imag()});
        blocks.push_back({{"N", b.label}, {"dim", b.matrix.rows()}, {"matrix", std::move(m)}});
    }
    return {{"kind", to_string(u.kind())}, {"n_total_max", u.truncation().n_total_max()}, {"blocks", std::move(blocks)}};
}

// ---------------------------------------------------------------------------
// Laboratory parameters.

struct LabParams {
    double Omega = 0.0;    // Rabi frequency, rad/s
    double eta = 0.0;      // Lamb-Dicke parameter, c.m. mode
    double eta_r = 0.0;    // Lamb-Dicke parameter, breathing mode
    double Delta = 1.0;    // detuning of the c.m. dispersive drive, rad/s
    double Delta_r = 1.0;  // detuning of the breathing-mode dispersive drive, rad/s
    double Omega_r = 0.0;  // Rabi frequency of the breathing-mode drive, rad/s
    double t = 0.0;        // interaction time, s
};

/// eta_r for a two-ion crystal whose breathing frequency is sqrt(3) times the
/// c.m. frequency.
inline double linked_trap_eta_r(double eta) { return std::pow(3.0, -0.25) * eta; }

inline bool linked_trap_consistent(const LabParams& p) { return std::abs(p.eta_r - linked_trap_eta_r(p.eta)) < 1e-12; }

struct EffectiveAngles {
    double theta = 0.0;   // beam-splitter angle 2 Omega eta eta_r t
    double phi = 0.0;     // c.m. phase chi t / 2
    double phi_r = 0.0;   // breathing phase chi_r t / 2
    double chi = 0.0;     // eta^2 Omega^2 / (2 Delta)
    double chi_r = 0.0;   // eta_r^2 Omega_r^2 / (2 Delta_r)
    double lambda = 0.0;  // single-mode JCM coupling eta Omega / 2
    double g = 0.0;       // two-mode JCM coupling Omega eta eta_r
};

inline EffectiveAngles lab_to_angles(const LabParams& p) {
    if (p.Delta == 0.0 || p.Delta_r == 0.0) throw ArgumentError("detunings Delta and Delta_r must be non-zero");
    EffectiveAngles a;
    a.theta = 2.0 * p.Omega * p.eta * p.eta_r * p.t;
    a.chi = p.eta * p.eta * p.Omega * p.Omega / (2.0 * p.Delta);
    a.phi = a.chi * p.t / 2.0;
    a.chi_r = p.eta_r * p.eta_r * p.Omega_r * p.Omega_r / (2.0 * p.Delta_r);
    a.phi_r = a.chi_r * p.t / 2.0;
    a.lambda = p.eta * p.Omega / 2.0;
    a.g = p.Omega * p.eta * p.eta_r;
    return a;
}

}  // namespace phonon
