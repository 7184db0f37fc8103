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

#include <algorithm>
#include <cmath>

#include "risloc/errors.hpp"
#include "risloc/lm.hpp"
#include "risloc/solvers.hpp"
#include "solver_detail.hpp"

namespace risloc {

namespace {

struct AoaSet
{
    std::vector<Vec3> anchors;
    std::vector<Vec3> local;  // measured unit directions in the UE frame
};

AoaSet collect_aoas(const SolveRequest& req)
{
    AoaSet out;
    for (const auto* m : detail::of_kind(req.measurements, MeasurementKind::AoA)) {
        out.anchors.push_back(last_anchor(m->path, req.scenario));
        out.local.push_back(azel_to_direction(AzEl{m->value1, m->value2}));
    }
    return out;
}

// Orientation-free residuals: measured minus predicted cosines between anchor directions.
Eigen::VectorXd invariant_residuals(const AoaSet& a, const Vec3& p)
{
    const std::size_t n = a.anchors.size();
    Eigen::VectorXd r(n * (n - 1) / 2);
    Eigen::Index k = 0;
    std::vector<Vec3> g;
    for (const auto& x : a.anchors) g.push_back(unit_direction(p, x));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) r[k++] = g[i].dot(g[j]) - a.local[i].dot(a.local[j]);
    return r;
}

bool all_collinear(const std::vector<Vec3>& pts)
{
    for (std::size_t i = 1; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const Vec3 u = pts[i] - pts[0], v = pts[j] - pts[0];
            if (u.cross(v).norm() > 1e-9 * u.norm() * v.norm()) return false;
        }
    return true;
}

std::vector<Vec3> from_grid(const SolveRequest& req, const AoaSet& a)
{
    Vec3 lo, hi;
    detail::scene_box(req.scenario, 1.5, 5.0, lo, hi);
    const auto cost = [&](const Vec3& p) { return invariant_residuals(a, p).squaredNorm(); };
    std::vector<Vec3> out;
    for (const Vec3& seed : detail::grid_minima(lo, hi, req.grid_cell, 12, cost)) {
        const ResidualFn f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            try {
                return invariant_residuals(a, x);
            } catch (const Error&) {
                return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(a.anchors.size() * (a.anchors.size() - 1) / 2), 1e3);
            }
        };
        out.push_back(levenberg_marquardt(f, seed).x);
    }
    return out;
}

// Local minima of the invariant cost along the half-line, each polished by golden section.
std::vector<Vec3> along_halfline(const AoaSet& a, const HalfLine& h, double reach)
{
    const auto cost = [&](double t) {
        try {
            return invariant_residuals(a, h.origin + t * h.direction).squaredNorm();
        } catch (const Error&) {
            return 1e300;
        }
    };
    const int n = 4000;
    const double t0 = 1e-3, t1 = reach;
    std::vector<double> ts(n), cs(n);
    for (int k = 0; k < n; ++k) {
        ts[k] = t0 * std::pow(t1 / t0, static_cast<double>(k) / (n - 1));
        cs[k] = cost(ts[k]);
    }
    std::vector<std::pair<double, double>> minima;
    for (int k = 1; k + 1 < n; ++k) {
        if (!(cs[k] <= cs[k - 1] && cs[k] <= cs[k + 1])) continue;
        double lo = ts[k - 1], hi = ts[k + 1];
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
            const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
            if (cost(x1) < cost(x2))
                hi = x2;
            else
                lo = x1;
        }
        const double t = 0.5 * (lo + hi);
        minima.emplace_back(cost(t), t);
    }
    std::stable_sort(minima.begin(), minima.end());
    std::vector<Vec3> out;
    for (std::size_t k = 0; k < minima.size() && k < 6; ++k) out.push_back(h.origin + minima[k].second * h.direction);
    return out;
}

}  // namespace

SolveResult solve_simo_aoa(const SolveRequest& req)
{
    const AoaSet a = collect_aoas(req);
    const auto aods = detail::of_kind(req.measurements, MeasurementKind::AoD);
    if (a.anchors.size() < 2 || (a.anchors.size() < 3 && aods.empty()))
        throw Infeasible("AoA positioning needs AoAs from 3 anchors, or 2 AoAs and an AoD");
    if (a.anchors.size() >= 3 && all_collinear(a.anchors)) throw NonIdentifiable("AoA anchors are collinear");

    std::vector<Vec3> seeds;
    if (!aods.empty()) {
        Vec3 lo, hi;
        detail::scene_box(req.scenario, 1.5, 5.0, lo, hi);
        seeds = along_halfline(a, detail::aod_halfline(*aods.front(), req.scenario), 10.0 * (hi - lo).norm());
    } else {
        seeds = from_grid(req, a);
    }
    return detail::finish(req, seeds, aods.empty() ? "simo-aoa" : "simo-aoa-halfline");
}

}  // namespace risloc
