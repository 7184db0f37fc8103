// SPDX-License-Identifier: Apache-2.0
//
// risloc: RIS-assisted radio localization simulator and solvers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "risloc/lm.hpp"

#include <cmath>

namespace risloc {

Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& x, double rel_step)
{
    Eigen::MatrixXd j;
    for (Eigen::Index c = 0; c < x.size(); ++c) {
        const double h = rel_step * std::max(1.0, std::abs(x[c]));
        Eigen::VectorXd xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        const Eigen::VectorXd d = (f(xp) - f(xm)) / (2.0 * h);
        if (c == 0) j.resize(d.size(), x.size());
        j.col(c) = d;
    }
    return j;
}

LmResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x0, const LmOptions& opt)
{
    LmResult out;
    out.x = std::move(x0);
    Eigen::VectorXd r = f(out.x);
    out.cost = 0.5 * r.squaredNorm();
    out.cost_history.push_back(out.cost);
    if (out.x.size() == 0 || out.cost == 0.0) {
        out.converged = true;
        return out;
    }

    double damping = opt.initial_damping;
    while (out.iterations < opt.max_iterations) {
        ++out.iterations;
        const Eigen::MatrixXd j = numeric_jacobian(f, out.x);
        const Eigen::VectorXd col_norm = j.colwise().norm();
        const double rnorm = r.norm();

        double max_cos = 0.0;
        const Eigen::VectorXd g = j.transpose() * r;
        for (Eigen::Index c = 0; c < g.size(); ++c)
            if (col_norm[c] > 0.0) max_cos = std::max(max_cos, std::abs(g[c]) / (col_norm[c] * rnorm));
        if (max_cos <= opt.gradient_tolerance) {
            out.converged = true;
            return out;
        }

        bool accepted = false;
        while (!accepted) {
            const auto n = out.x.size();
            Eigen::MatrixXd aug(j.rows() + n, n);
            aug.topRows(j.rows()) = j;
            aug.bottomRows(n) = (std::sqrt(damping) * col_norm).asDiagonal();
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(j.rows() + n);
            rhs.head(j.rows()) = -r;
            const Eigen::VectorXd dx = aug.completeOrthogonalDecomposition().solve(rhs);

            const Eigen::VectorXd x_new = out.x + dx;
            const Eigen::VectorXd r_new = f(x_new);
            const double cost_new = 0.5 * r_new.squaredNorm();
            const bool tiny_step = dx.norm() <= opt.step_tolerance * std::max(1.0, out.x.norm());

            if (std::isfinite(cost_new) && cost_new < out.cost) {
                out.x = x_new;
                r = r_new;
                out.cost = cost_new;
                out.cost_history.push_back(cost_new);
                damping = std::max(damping / 10.0, 1e-15);
                accepted = true;
                if (tiny_step || cost_new == 0.0) {
                    out.converged = true;
                    return out;
                }
            } else {
                if (tiny_step || damping > 1e16) {
                    // No descent left: a minimum if the gradient is at noise level.
                    out.converged = max_cos <= 1e-6;
                    return out;
                }
                damping *= 10.0;
            }
        }
    }
    return out;
}

}  // namespace risloc
