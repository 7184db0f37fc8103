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

#include "risloc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "risloc/constants.hpp"
#include "risloc/errors.hpp"
#include "risloc/lm.hpp"
#include "solver_detail.hpp"

namespace risloc {

namespace detail {

std::vector<const Measurement*> of_kind(const MeasurementSet& m, MeasurementKind k)
{
    std::vector<const Measurement*> out;
    for (const auto& x : m.items)
        if (x.kind == k) out.push_back(&x);
    return out;
}

NoiseSigmas positive(const NoiseSigmas& fallback)
{
    NoiseSigmas out = fallback;
    const NoiseSigmas defaults;
    for (auto k : {MeasurementKind::ToA, MeasurementKind::TDoA, MeasurementKind::RTT, MeasurementKind::AoD,
                   MeasurementKind::AoA, MeasurementKind::Doppler})
        if (!(out[k] > 0.0)) out[k] = defaults[k];
    return out;
}

double sigma_of(const Measurement& m, const NoiseSigmas& fallback)
{
    return m.sigma > 0.0 ? m.sigma : positive(fallback)[m.kind];
}

void scene_box(const Scenario& s, double grow, double min_half, Vec3& lo, Vec3& hi)
{
    lo = Vec3::Constant(1e300);
    hi = Vec3::Constant(-1e300);
    for (const auto& b : s.bss) lo = lo.cwiseMin(b.position), hi = hi.cwiseMax(b.position);
    for (const auto& r : s.riss) lo = lo.cwiseMin(r.center), hi = hi.cwiseMax(r.center);
    const Vec3 c = 0.5 * (lo + hi);
    const Vec3 half = (0.5 * grow * (hi - lo)).cwiseMax(min_half);
    lo = c - half;
    hi = c + half;
}

std::vector<Vec3> grid_minima(const Vec3& lo, const Vec3& hi, double cell, int keep,
                              const std::function<double(const Vec3&)>& cost, int max_per_axis)
{
    const Vec3 span = hi - lo;
    cell = std::max(cell, span.maxCoeff() / max_per_axis);
    int n[3];
    for (int a = 0; a < 3; ++a) n[a] = std::max(1, static_cast<int>(std::ceil(span[a] / cell))) + 1;
    const auto at = [&](int i, int j, int k) -> Vec3 { return lo + cell * Vec3(i, j, k); };

    std::vector<double> c(static_cast<std::size_t>(n[0]) * n[1] * n[2]);
    const auto idx = [&](int i, int j, int k) { return (static_cast<std::size_t>(i) * n[1] + j) * n[2] + k; };
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            for (int k = 0; k < n[2]; ++k) {
                double v;
                try {
                    v = cost(at(i, j, k));
                } catch (const Error&) {
                    v = 1e300;
                }
                c[idx(i, j, k)] = std::isfinite(v) ? v : 1e300;
            }

    std::vector<std::pair<double, Vec3>> minima;
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            for (int k = 0; k < n[2]; ++k) {
                const double v = c[idx(i, j, k)];
                bool low = v < 1e300;
                for (int di = -1; di <= 1 && low; ++di)
                    for (int dj = -1; dj <= 1 && low; ++dj)
                        for (int dk = -1; dk <= 1 && low; ++dk) {
                            const int a = i + di, b = j + dj, e = k + dk;
                            if ((di || dj || dk) && a >= 0 && b >= 0 && e >= 0 && a < n[0] && b < n[1] && e < n[2])
                                low = v <= c[idx(a, b, e)];
                        }
                if (low) minima.emplace_back(v, at(i, j, k));
            }
    std::stable_sort(minima.begin(), minima.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Vec3> out;
    for (const auto& m : minima) {
        if (static_cast<int>(out.size()) >= keep) break;
        out.push_back(m.second);
    }
    return out;
}

namespace {

double clock_from_toas(const SolveRequest& req, const UeState& u)
{
    double sum = 0.0;
    int n = 0;
    for (const auto* m : of_kind(req.measurements, MeasurementKind::ToA)) {
        sum += m->value1 - path_length(m->path, req.scenario, u) / kSpeedOfLight;
        ++n;
    }
    return n ? sum / n : u.clock_bias;
}

std::vector<DirectionPair> aoa_pairs(const SolveRequest& req, const UeState& u)
{
    std::vector<DirectionPair> out;
    for (const auto* m : of_kind(req.measurements, MeasurementKind::AoA))
        out.push_back({unit_direction(u.position, last_anchor(m->path, req.scenario)),
                       azel_to_direction(AzEl{m->value1, m->value2})});
    return out;
}

// Drops measurements whose nuisance block is not being estimated.
MeasurementSet usable(const SolveRequest& req)
{
    MeasurementSet out;
    out.seed = req.measurements.seed;
    for (const auto& m : req.measurements.items) {
        if (m.kind == MeasurementKind::Doppler && !req.unknowns.velocity) continue;
        if (m.kind == MeasurementKind::AoA && !req.unknowns.orientation) continue;
        if (m.kind == MeasurementKind::ToA && !req.unknowns.clock) continue;
        out.items.push_back(m);
    }
    return out;
}

}  // namespace

SolveResult finish(const SolveRequest& req, const std::vector<Vec3>& positions, std::string method)
{
    if (positions.empty()) throw Infeasible(method + ": no candidate position");
    const UnknownMask& mask = req.unknowns;
    SolveRequest base = req;
    base.measurements = usable(req);

    std::vector<SolveResult> runs;
    for (const Vec3& p : positions) {
        UeState u = req.initial.value_or(UeState{});
        u.position = p;
        if (mask.clock) u.clock_bias = clock_from_toas(base, u);
        if (mask.orientation) {
            try {
                u.orientation = solve_orientation(aoa_pairs(base, u));
            } catch (const Error&) {
                // leave the prior orientation; refine will move it if it can
            }
        }
        if (mask.velocity) u.velocity = solve_velocity(doppler_rows(base, u), req.scenario.lambda()).velocity;

        SolveRequest r = base;
        r.initial = u;
        SolveResult res = refine(r);
        if (mask.velocity) {
            const VelocityFix v = solve_velocity(doppler_rows(base, res.estimate), req.scenario.lambda());
            res.estimate.velocity = v.velocity;
            res.velocity_dim = v.dimension;
            res.velocity_subspace = v.subspace;
        }
        runs.push_back(std::move(res));
    }

    std::stable_sort(runs.begin(), runs.end(),
                     [](const SolveResult& a, const SolveResult& b) { return a.residual < b.residual; });

    // Keep alternatives that explain the data about as well as the best one.
    const double n_res = static_cast<double>(residual_sigmas(base.measurements, req.fallback_sigmas).size());
    const double limit = runs.front().residual * runs.front().residual + std::max(25.0, 2.0 * n_res);

    SolveResult out = runs.front();
    out.method = std::move(method);
    out.candidates.clear();
    for (const auto& r : runs) {
        if (r.residual * r.residual > limit) continue;
        bool dup = false;
        for (const auto& c : out.candidates)
            dup = dup || (c.state.position - r.estimate.position).norm() <= 1e-4 * std::max(1.0, c.state.position.norm());
        if (!dup) out.candidates.push_back({r.estimate, r.residual});
    }
    out.estimated = mask;
    out.estimated.velocity = mask.velocity && out.velocity_dim > 0;
    return out;
}

}  // namespace detail

SolveResult refine(const SolveRequest& req)
{
    if (!req.initial) throw Infeasible("refine needs an initial guess");
    const UnknownMask& mask = req.unknowns;
    const UeState start = *req.initial;
    const Eigen::VectorXd sig = residual_sigmas(req.measurements, detail::positive(req.fallback_sigmas));

    // Clock is carried in meters so all blocks have comparable step sizes.
    Eigen::VectorXd unit = Eigen::VectorXd::Ones(mask.dim());
    for (const auto& b : block_layout(mask))
        if (b.block == Block::Clock) unit[b.offset] = kSpeedOfLight;

    const auto state_of = [&](const Eigen::VectorXd& x) { return unpack(x.cwiseQuotient(unit), mask, start); };
    const ResidualFn f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        try {
            return residuals(req.measurements, req.scenario, state_of(x)).cwiseQuotient(sig);
        } catch (const Error&) {
            return Eigen::VectorXd::Constant(sig.size(), 1e10);
        }
    };

    const LmResult lm = levenberg_marquardt(f, pack(start, mask).cwiseProduct(unit));

    SolveResult out;
    out.estimate = state_of(lm.x);
    if (mask.orientation) out.estimate.orientation = euler_from_rotation(rot_zyx(out.estimate.orientation));
    out.estimated = mask;
    out.residual = std::sqrt(2.0 * lm.cost);
    out.iterations = lm.iterations;
    out.converged = lm.converged && std::isfinite(out.residual);
    out.cost_history = lm.cost_history;
    out.candidates.push_back({out.estimate, out.residual});
    out.method = "refine";
    if (!out.converged) out.warnings.push_back("refine did not converge");
    return out;
}

Rot3 solve_rotation(const std::vector<DirectionPair>& pairs)
{
    if (pairs.size() < 2) throw NonIdentifiable("orientation needs at least two direction pairs");
    bool spread = false;
    for (std::size_t i = 0; i < pairs.size() && !spread; ++i)
        for (std::size_t j = i + 1; j < pairs.size() && !spread; ++j)
            spread = pairs[i].global.normalized().cross(pairs[j].global.normalized()).norm() > 1e-9;
    if (!spread) throw NonIdentifiable("orientation underdetermined: direction pairs are parallel");

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (const auto& p : pairs) h += p.global.normalized() * p.local.normalized().transpose();
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    return svd.matrixU() * d * svd.matrixV().transpose();
}

EulerZYX solve_orientation(const std::vector<DirectionPair>& pairs)
{
    return euler_from_rotation(solve_rotation(pairs));
}

VelocityFix solve_velocity(const std::vector<DopplerRow>& rows, double lambda)
{
    VelocityFix out;
    out.subspace.resize(3, 0);
    if (rows.empty()) return out;

    Eigen::MatrixXd a(rows.size(), 3);
    Eigen::VectorXd b(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        a.row(i) = (-rows[i].legs / (lambda * rows[i].sigma)) * rows[i].direction.transpose();
        b[i] = rows[i].hz / rows[i].sigma;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Eigen::VectorXd s = svd.singularValues();
    int r = 0;
    while (r < s.size() && s[r] > kRankTolerance * s[0]) ++r;
    if (s.size() == 0 || s[0] == 0.0) r = 0;

    for (int k = 0; k < r; ++k)
        out.velocity += svd.matrixV().col(k) * (svd.matrixU().col(k).dot(b) / s[k]);
    out.dimension = r;
    out.subspace = svd.matrixV().leftCols(r);
    return out;
}

std::vector<DopplerRow> doppler_rows(const SolveRequest& req, const UeState& at)
{
    std::vector<DopplerRow> out;
    for (const auto* m : detail::of_kind(req.measurements, MeasurementKind::Doppler))
        out.push_back({path_length_gradient(m->path, req.scenario, at), m->value1,
                       detail::sigma_of(*m, req.fallback_sigmas),
                       m->path.type == Path::Type::Monostatic ? 2.0 : 1.0});
    return out;
}

namespace {

int count_paths(const MeasurementSet& m, MeasurementKind k, Path::Type t)
{
    int n = 0;
    for (const auto& x : m.items) n += x.kind == k && x.path.type == t;
    return n;
}

void append_mask_warnings(SolveResult& r, const SolveRequest& req)
{
    const UnknownMask allowed = scenario_mask(req.scenario);
    const auto check = [&](bool want, bool ok, const char* what) {
        if (want && !ok)
            r.warnings.push_back(std::string("rank warning: ") + what +
                                 " is not identifiable for this measurement mix");
    };
    check(req.unknowns.clock, allowed.clock, "clock bias");
    check(req.unknowns.velocity, allowed.velocity, "velocity");
    check(req.unknowns.orientation, allowed.orientation, "orientation");
}

}  // namespace

SolveResult solve(const SolveRequest& req)
{
    using K = MeasurementKind;
    using T = Path::Type;
    const auto& m = req.measurements;
    const int aod_total = static_cast<int>(m.count(K::AoD));
    const int aoa_total = static_cast<int>(m.count(K::AoA));
    const int toa_direct = count_paths(m, K::ToA, T::Direct);
    const int toa_reflected = count_paths(m, K::ToA, T::Reflected);
    const int rtt_direct = count_paths(m, K::RTT, T::Direct);
    const int rtt_mono = count_paths(m, K::RTT, T::Monostatic);
    const int ris_aod = count_paths(m, K::AoD, T::Reflected) + count_paths(m, K::AoD, T::Monostatic);

    SolveResult r;
    if (aoa_total >= 3 && aod_total == 0)
        r = solve_simo_aoa(req);
    else if (aoa_total >= 2 && aod_total == 1)
        r = solve_simo_aoa(req);
    else if (aod_total >= 2)
        r = solve_aod_halflines(req);
    else if ((toa_direct >= 4 || rtt_direct >= 3 || m.count(K::TDoA) >= 3) && ris_aod == 0)
        r = solve_tdoa_4bs(req);
    else if (toa_reflected >= 1 && ris_aod >= 1)
        r = solve_siso_1ris_1bs(req);
    else if (rtt_mono >= 1 && ris_aod >= 1)
        r = solve_siso_1ris_0bs(req);
    else
        throw Infeasible(
            "no solver for this measurement mix: 3D positioning needs 4 BS ToAs, a direct and a reflected ToA with an "
            "RIS AoD, an RTT with an RIS AoD, two AoDs, or AoAs from three anchors");
    append_mask_warnings(r, req);
    return r;
}

void write_result_csv(std::ostream& os, const SolveResult& r)
{
    os << "component,value,residual,converged,candidate_rank\n";
    char buf[256];
    for (std::size_t k = 0; k < r.candidates.size(); ++k) {
        const UeState& u = r.candidates[k].state;
        const auto row = [&](const char* name, double v) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%d,%zu\n", name, v, r.candidates[k].residual,
                          r.converged ? 1 : 0, k);
            os << buf;
        };
        if (r.estimated.position) row("px", u.position.x()), row("py", u.position.y()), row("pz", u.position.z());
        if (r.estimated.clock) row("clock_bias", u.clock_bias);
        if (r.estimated.velocity)
            row("vx", u.velocity.x()), row("vy", u.velocity.y()), row("vz", u.velocity.z());
        if (r.estimated.orientation)
            row("alpha", u.orientation.alpha), row("beta", u.orientation.beta), row("gamma", u.orientation.gamma);
    }
}

}  // namespace risloc
