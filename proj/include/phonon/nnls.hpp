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

#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace phonon {

struct NnlsResult {
    Eigen::VectorXd x;
    double residual_norm = 0.0;  // ||A x - b||_2
    int iterations = 0;
};

/// Lawson-Hanson active-set solver for min ||A x - b||_2 subject to x >= 0.
inline NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = -1) {
    const Eigen::Index ncols = a.cols();
    if (max_iterations < 0) max_iterations = static_cast<int>(3 * ncols + 10);
    const double tol = 10.0 * std::numeric_limits<double>::epsilon() * a.cwiseAbs().colwise().sum().maxCoeff() *
                       static_cast<double>(std::max(a.rows(), ncols));

    Eigen::VectorXd x = Eigen::VectorXd::Zero(ncols);
    std::vector<bool> passive(static_cast<std::size_t>(ncols), false);
    NnlsResult res;

    auto solve_passive = [&](Eigen::VectorXd& z) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < ncols; ++j)
            if (passive[j]) idx.push_back(j);
        Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
        const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);
        z.setZero(ncols);
        for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
    };

    Eigen::VectorXd w = a.transpose() * (b - a * x);
    Eigen::VectorXd z(ncols);
    while (res.iterations < max_iterations) {
        Eigen::Index best = -1;
        double best_w = tol;
        for (Eigen::Index j = 0; j < ncols; ++j) {
            if (!passive[j] && w(j) > best_w) {
                best_w = w(j);
                best = j;
            }
        }
        if (best < 0) break;
        passive[best] = true;

        for (;;) {
            ++res.iterations;
            solve_passive(z);
            bool feasible = true;
            for (Eigen::Index j = 0; j < ncols; ++j)
                if (passive[j] && z(j) <= 0.0) feasible = false;
            if (feasible) {
                x = z;
                break;
            }
            double step = 1.0;
            for (Eigen::Index j = 0; j < ncols; ++j) {
                if (passive[j] && z(j) <= 0.0) step = std::min(step, x(j) / (x(j) - z(j)));
            }
            x += step * (z - x);
            for (Eigen::Index j = 0; j < ncols; ++j) {
                if (passive[j] && std::abs(x(j)) <= tol) {
                    passive[j] = false;
                    x(j) = 0.0;
                }
            }
            if (res.iterations >= max_iterations) break;
        }
        w = a.transpose() * (b - a * x);
    }
    res.x = x;
    res.residual_norm = (a * x - b).norm();
    return res;
}

}  // namespace phonon
