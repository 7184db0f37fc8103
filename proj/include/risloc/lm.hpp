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

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace risloc {

struct LmOptions
{
    int max_iterations = 100;
    double step_tolerance = 1e-10;  // on ||dx|| / max(1, ||x||)
    double gradient_tolerance = 1e-9;  // on the largest residual/column cosine
    double initial_damping = 1e-3;
};

struct LmResult
{
    Eigen::VectorXd x;
    double cost = 0.0;  // 0.5 ||r||^2
    int iterations = 0;
    bool converged = false;
    std::vector<double> cost_history;  // one entry per accepted point, starting with x0
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central differences with step max(rel_step * |x_j|, rel_step).
Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& x, double rel_step = 1e-7);

/*!
 * Levenberg-Marquardt with Marquardt (diagonal) scaling. Steps solve the
 * damped problem by complete orthogonal decomposition, so directions the
 * residuals do not see get a zero (minimum-norm) step. Only steps that lower
 * the cost are accepted. A run that cannot reduce the cost while the gradient
 * is still significant reports converged = false.
 */
LmResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x0, const LmOptions& opt = {});

}  // namespace risloc
