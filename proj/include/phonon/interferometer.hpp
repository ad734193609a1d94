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

// Mach-Zehnder interferometer on the two motional modes:
//   |out> = exp(i pi/2 J_x) exp(i phi a+a) exp(i pi/2 J_x) |in>
// and the phase-estimation statistics of J_z at its output.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "phonon/fockspace.hpp"
#include "phonon/operators.hpp"

namespace phonon {

inline constexpr double kDefaultFdStep = 1e-4;

struct InterferometerReport {
    double phi = 0.0;
    double mean_Jz = 0.0;
    double mean_Jz2 = 0.0;
    double var_Jz = 0.0;
    double dmeanJz_dphi = 0.0;
    double delta_phi = std::numeric_limits<double>::infinity();
};

/// Both 50/50 splitters of the interferometer are B1(-pi/2) = exp(+i pi/2 J_x).
class MachZehnder {
   public:
    explicit MachZehnder(Truncation trunc) : splitter_(beam_splitter(BeamSplitterKind::B1, -kPi / 2.0, trunc)) {}

    MotionalState output(const MotionalState& in, double phi) const {
        require_same_truncation(splitter_.truncation(), in.truncation());
        const auto shifter = phase_shifter(Mode::CenterOfMass, phi, in.truncation());
        std::vector<cd> a(in.dim()), b(in.dim());
        splitter_.apply_to(in.amplitudes(), a);
        shifter.apply_to(a, b);
        splitter_.apply_to(b, a);
        return in.with_amplitudes(std::move(a));
    }

    InterferometerReport report(const MotionalState& in, double phi, double fd_step = kDefaultFdStep) const {
        if (!(fd_step > 0.0 && fd_step <= 0.1)) throw ArgumentError("fd_step must lie in (0, 0.1]");
        const auto out = output(in, phi);
        InterferometerReport r;
        r.phi = phi;
        r.mean_Jz = expect(out, Observable::Jz);
        r.mean_Jz2 = expect(out, Observable::Jz2);
        r.var_Jz = r.mean_Jz2 - r.mean_Jz * r.mean_Jz;
        const double up = expect(output(in, phi + fd_step), Observable::Jz);
        const double down = expect(output(in, phi - fd_step), Observable::Jz);
        r.dmeanJz_dphi = (up - down) / (2.0 * fd_step);
        r.delta_phi = std::abs(r.dmeanJz_dphi) < 1e-14 ? std::numeric_limits<double>::infinity()
                                                        : std::sqrt(std::max(r.var_Jz, 0.0)) / std::abs(r.dmeanJz_dphi);
        return r;
    }

   private:
    UnitaryOperator splitter_;
};

inline MotionalState mz_output(const MotionalState& in, double phi) { return MachZehnder(in.truncation()).output(in, phi); }

inline InterferometerReport mz_report(const MotionalState& in, double phi, double fd_step = kDefaultFdStep) {
    return MachZehnder(in.truncation()).report(in, phi, fd_step);
}

/// One report per grid point, in grid order. workers > 1 evaluates
/// contiguous chunks of the grid concurrently.
inline std::vector<InterferometerReport> phase_sweep(const MotionalState& in, const std::vector<double>& phis,
                                                     double fd_step = kDefaultFdStep, unsigned workers = 1) {
    if (phis.empty()) throw ArgumentError("phase sweep needs a non-empty grid");
    if (!(fd_step > 0.0 && fd_step <= 0.1)) throw ArgumentError("fd_step must lie in (0, 0.1]");
    const MachZehnder mz(in.truncation());
    std::vector<InterferometerReport> out(phis.size());
    const std::size_t nworkers = std::clamp<std::size_t>(workers, 1, phis.size());
    if (nworkers == 1) {
        for (std::size_t i = 0; i < phis.size(); ++i) out[i] = mz.report(in, phis[i], fd_step);
        return out;
    }
    std::vector<std::future<void>> jobs;
    const std::size_t chunk = (phis.size() + nworkers - 1) / nworkers;
    for (std::size_t begin = 0; begin < phis.size(); begin += chunk) {
        const std::size_t end = std::min(phis.size(), begin + chunk);
        jobs.push_back(std::async(std::launch::async, [&, begin, end] {
            for (std::size_t i = begin; i < end; ++i) out[i] = mz.report(in, phis[i], fd_step);
        }));
    }
    for (auto& j : jobs) j.get();
    return out;
}

/// points equally spaced phases on [lo, hi).
inline std::vector<double> phase_grid(double lo, double hi, std::size_t points) {
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points);
    return g;
}

/// Header "phi,mean_jz,mean_jz2,var_jz,dmeanjz_dphi,delta_phi"; 17 significant digits.
inline void write_sweep_csv(std::ostream& os, const std::vector<InterferometerReport>& rows) {
    std::ostringstream buf;
    buf.precision(17);
    buf << "phi,mean_jz,mean_jz2,var_jz,dmeanjz_dphi,delta_phi\n";
    for (const auto& r : rows) {
        buf << r.phi << ',' << r.mean_Jz << ',' << r.mean_Jz2 << ',' << r.var_Jz << ',' << r.dmeanJz_dphi << ',';
        if (std::isinf(r.delta_phi))
            buf << "inf";
        else
            buf << r.delta_phi;
        buf << '\n';
    }
    os << buf.str();
}

}  // namespace phonon
