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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"

using namespace phonon;

namespace {

/// Dense exp(i pi/2 J_x) exp(i phi a+a) exp(i pi/2 J_x).
Eigen::MatrixXcd dense_mz(int nmax, double phi) {
    const auto ops = oracle::schwinger(nmax);
    const Eigen::MatrixXcd split = oracle::expi(ops.jx, -kPi / 2);
    return split * oracle::expi(ops.nc, -phi) * split;
}

}  // namespace

TEST(MachZehnder, Examples) {
    const Truncation t(40);
    const auto vac = mz_output(make_vacuum(t), 1.3);
    EXPECT_NEAR(std::norm(vac.amplitude(0, 0)), 1.0, 1e-15);
    EXPECT_NEAR(mz_report(make_coherent(0.0, 2.0, t), 0.0).mean_Jz, 2.0, 1e-9);

    const Truncation t6(6);
    const auto one = mz_output(make_fock(1, 0, t6), kPi);
    const Eigen::VectorXcd ref = dense_mz(6, kPi) * oracle::basis(6, 1, 0);
    EXPECT_LT((oracle::vec(one) - ref).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(expect(one, Observable::Jz), oracle::expect(oracle::schwinger(6).jz, ref), 1e-12);
}

TEST(MachZehnder, FockInputsMatchDenseComposition) {
    const Truncation t(6);
    for (double phi : {0.0, 0.4, kPi / 2, 2.2, kPi}) {
        const auto u = dense_mz(6, phi);
        for (int m = 0; m <= 4; ++m)
            for (int n = 0; m + n <= 4; ++n) {
                const auto out = mz_output(make_fock(m, n, t), phi);
                EXPECT_LT((oracle::vec(out) - u.col(oracle::idx(m, n))).cwiseAbs().maxCoeff(), 1e-10);
            }
    }
}

TEST(MachZehnder, CoherentStatistics) {
    for (double n : {1.0, 4.0, 9.0}) {
        const Truncation t(60);
        const auto in = make_coherent(0.0, std::sqrt(n), t);
        ASSERT_LT(in.tail_mass(), 1e-12);
        for (int i = 0; i < 16; ++i) {
            const double phi = 2.0 * kPi * i / 16.0;
            const auto r = mz_report(in, phi);
            EXPECT_NEAR(r.mean_Jz, 0.5 * n * std::cos(phi), 1e-8);
            EXPECT_NEAR(r.mean_Jz2, 0.25 * n * (1.0 + n * std::cos(phi) * std::cos(phi)), 1e-7);
            EXPECT_NEAR(r.var_Jz, 0.25 * n, 1e-8);
            EXPECT_GE(r.var_Jz, -1e-12);
        }
        EXPECT_NEAR(mz_report(in, kPi / 2).delta_phi, 1.0 / std::sqrt(n), 1e-6);
    }
}

TEST(MachZehnder, PeriodicityAndEnergy) {
    std::mt19937 rng(99);
    const auto in = oracle::random_state(rng, 8);
    for (double phi : {0.1, 1.7, 4.0}) {
        const auto a = mz_report(in, phi), b = mz_report(in, phi + 2.0 * kPi);
        EXPECT_NEAR(a.mean_Jz, b.mean_Jz, 1e-10);
        EXPECT_NEAR(a.mean_Jz2, b.mean_Jz2, 1e-10);
        EXPECT_NEAR(a.var_Jz, b.var_Jz, 1e-10);
        EXPECT_NEAR(a.dmeanJz_dphi, b.dmeanJz_dphi, 1e-8);
        const auto out = mz_output(in, phi);
        EXPECT_NEAR(expect(out, Observable::Nc) + expect(out, Observable::Nr),
                    expect(in, Observable::Nc) + expect(in, Observable::Nr), 1e-12);
    }
}

TEST(MachZehnder, DeltaPhiInfiniteAtFlatFringe) {
    const auto r = mz_report(make_vacuum(Truncation(4)), 0.3);
    EXPECT_TRUE(std::isinf(r.delta_phi));
    EXPECT_THROW(mz_report(make_vacuum(Truncation(4)), 0.3, 0.0), ArgumentError);
    EXPECT_THROW(mz_report(make_vacuum(Truncation(4)), 0.3, 0.2), ArgumentError);
}

TEST(PhaseSweep, OrderingWorkersAndGrid) {
    const auto in = make_coherent(0.0, 2.0, Truncation(40));
    const auto grid = phase_grid(0.0, 2.0 * kPi, 64);
    ASSERT_EQ(grid.size(), 64u);
    EXPECT_EQ(grid.front(), 0.0);
    EXPECT_NEAR(grid.back(), 2.0 * kPi * 63.0 / 64.0, 1e-15);
    const auto serial = phase_sweep(in, grid);
    const auto parallel = phase_sweep(in, grid, kDefaultFdStep, 5);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_EQ(serial[i].phi, grid[i]);
        EXPECT_EQ(serial[i].mean_Jz, parallel[i].mean_Jz);
        EXPECT_EQ(serial[i].delta_phi, parallel[i].delta_phi);
        EXPECT_NEAR(serial[i].mean_Jz, 2.0 * std::cos(grid[i]), 1e-9);
    }
    const auto single = phase_sweep(in, {0.7});
    const auto direct = mz_report(in, 0.7);
    EXPECT_EQ(single.at(0).mean_Jz, direct.mean_Jz);
    EXPECT_EQ(single.at(0).delta_phi, direct.delta_phi);
    EXPECT_THROW(phase_sweep(in, {}), ArgumentError);

    for (const auto& r : phase_sweep(make_vacuum(Truncation(3)), grid, kDefaultFdStep, 3)) EXPECT_EQ(r.mean_Jz, 0.0);
}

TEST(PhaseSweep, CsvFormat) {
    std::ostringstream os;
    write_sweep_csv(os, phase_sweep(make_vacuum(Truncation(2)), {0.0}));
    EXPECT_EQ(os.str(), "phi,mean_jz,mean_jz2,var_jz,dmeanjz_dphi,delta_phi\n0,0,0,0,0,inf\n");
}
