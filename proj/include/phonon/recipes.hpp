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

// State-generation recipes built from the beam splitters and phase shifters.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "phonon/fockspace.hpp"
#include "phonon/operators.hpp"

namespace phonon {

enum class NumberInput { OneZero, OneOne };

/// Beam splitter acting on |1,0> or |1,1>.
inline MotionalState entangled_number(BeamSplitterKind kind, NumberInput input, double theta, Truncation trunc) {
    if (trunc.n_total_max() < 2) throw TruncationError("entangled number states need n_total_max >= 2");
    const auto in = input == NumberInput::OneZero ? make_fock(1, 0, trunc) : make_fock(1, 1, trunc);
    return apply(beam_splitter(kind, theta, trunc), in);
}

/// Normalised |a1>_c|b1>_r + sign |a2>_c|b2>_r expanded directly from
/// coherent amplitudes, without applying any operator. Used as the target for
/// the cat recipes.
inline MotionalState coherent_pair_superposition(cd a1, cd b1, cd a2, cd b2, double sign, Truncation trunc,
                                                 double tail_tolerance = kDefaultTailTolerance) {
    const int nmax = trunc.n_total_max();
    // Expand far enough past N_max that the discarded weight is measurable.
    const int reach = nmax + 64 + static_cast<int>(4.0 * (std::abs(a1) + std::abs(b1) + std::abs(a2) + std::abs(b2)) *
                                                   (std::abs(a1) + std::abs(b1) + std::abs(a2) + std::abs(b2)));
    const auto ca1 = coherent_amplitudes(a1, reach), cb1 = coherent_amplitudes(b1, reach);
    const auto ca2 = coherent_amplitudes(a2, reach), cb2 = coherent_amplitudes(b2, reach);
    std::vector<cd> amps(trunc.dim());
    double kept = 0.0, total_weight = 0.0;
    for (int total = 0; total <= 2 * reach; ++total) {
        for (int m = std::max(0, total - reach); m <= std::min(total, reach); ++m) {
            const int n = total - m;
            const cd c = ca1[m] * cb1[n] + sign * ca2[m] * cb2[n];
            const double w = std::norm(c);
            total_weight += w;
            if (total <= nmax) {
                amps[Truncation::block_offset(total) + m] = c;
                kept += w;
            }
        }
    }
    return MotionalState(trunc, std::move(amps), total_weight > 0.0 ? 1.0 - kept / total_weight : 0.0, tail_tolerance);
}

/// B2(theta) applied to a c.m. cat state times breathing vacuum.
inline MotionalState entangled_cat(cd alpha, Parity parity, double theta, Truncation trunc,
                                   double tail_tolerance = kDefaultTailTolerance) {
    const auto in = make_cat(alpha, parity, Mode::CenterOfMass, trunc, tail_tolerance);
    return apply(beam_splitter(BeamSplitterKind::B2, theta, trunc), in);
}

/// N_(+/-)[|a~>_c|b~>_r +/- |-a~>_c|-b~>_r] with a~ = alpha cos(theta/2), b~ = alpha sin(theta/2).
inline MotionalState entangled_cat_target(cd alpha, Parity parity, double theta, Truncation trunc) {
    const cd at = alpha * std::cos(0.5 * theta), bt = alpha * std::sin(0.5 * theta);
    if (parity == Parity::Odd && std::abs(alpha) == 0.0) throw ArgumentError("odd cat state with alpha = 0 is the zero vector");
    return coherent_pair_superposition(at, bt, -at, -bt, parity == Parity::Even ? 1.0 : -1.0, trunc);
}

/// Output of the U2 (theta = pi/2) then U3 (chi t = 2 pi) sequence on
/// (ion 1) x |g>_2 x cat_c(alpha) |beta>_r. Ion 1 must be in the sigma_x = +1
/// eigenstate and ion 2 in |g>; both remain unchanged.
inline JointState entangled_cat_u2u3(cd alpha, cd beta, Parity parity, Truncation trunc,
                                     QubitState ion1 = QubitState::plus_x(), QubitState ion2 = QubitState::ground(),
                                     double tail_tolerance = kDefaultTailTolerance) {
    if (qubit_overlap_squared(ion1, QubitState::plus_x()) < 1.0 - 1e-12) {
        throw RegisterError("ion 1 must be prepared in the sigma_x = +1 eigenstate (|g> + |e>)/sqrt2");
    }
    if (qubit_overlap_squared(ion2, QubitState::ground()) < 1.0 - 1e-12) {
        throw RegisterError("ion 2 must be prepared in |g>");
    }
    const int nmax = trunc.n_total_max();
    const auto cat = cat_amplitudes(alpha, parity, nmax);
    const auto coh = coherent_amplitudes(beta, nmax);
    const auto motion = make_product(cat, coh, trunc, tail_tolerance);
    auto js = JointState::product(ion1, ion2, motion);
    js = joint_bs_propagator(BeamSplitterKind::B2, kPi / 2.0, js);
    return conditional_phase(Mode::CenterOfMass, 2.0 * kPi, js);
}

/// Normalised |eps_->_c|eps_+>_r +/- |eps_+>_c|eps_->_r, eps_(+/-) = (beta +/- alpha)/sqrt2.
inline MotionalState entangled_cat_u2u3_target(cd alpha, cd beta, Parity parity, Truncation trunc) {
    const double r = 1.0 / std::sqrt(2.0);
    const cd ep = r * (beta + alpha), em = r * (beta - alpha);
    return coherent_pair_superposition(em, ep, ep, em, parity == Parity::Even ? 1.0 : -1.0, trunc);
}

}  // namespace phonon
