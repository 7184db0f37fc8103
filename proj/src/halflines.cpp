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

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "risloc/constants.hpp"
#include "risloc/errors.hpp"
#include "risloc/solvers.hpp"
#include "solver_detail.hpp"

namespace risloc {

using detail::of_kind;

HalfLineFix solve_two_halflines(const HalfLine& h1, const HalfLine& h2)
{
    const Vec3 d1 = h1.direction.normalized();
    const Vec3 d2 = h2.direction.normalized();
    const double b = d1.dot(d2);
    const double den = 1.0 - b * b;
    if (den < 1e-12) throw NonIdentifiable("half-lines are parallel");

    const Vec3 w0 = h1.origin - h2.origin;
    const double d = d1.dot(w0);
    const double e = d2.dot(w0);
    HalfLineFix out;
    out.t1 = (b * e - d) / den;
    out.t2 = (e - b * d) / den;
    if (out.t1 < 0.0 || out.t2 < 0.0)
        throw Infeasible("half-lines do not meet in front of both origins (t1 = " + std::to_string(out.t1) +
                         ", t2 = " + std::to_string(out.t2) + ")");
    const Vec3 p1 = h1.origin + out.t1 * d1;
    const Vec3 p2 = h2.origin + out.t2 * d2;
    out.position = 0.5 * (p1 + p2);
    out.gap = (p1 - p2).norm();
    return out;
}

HalfLine detail::aod_halfline(const Measurement& m, const Scenario& s)
{
    const AzEl a{m.value1, m.value2};
    if (m.path.type == Path::Type::Direct) {
        const BsNode& bs = s.bss.at(m.path.bs);
        return {bs.position, bs_aod_direction(bs, a)};
    }
    const RisNode& ris = s.riss.at(m.path.ris);
    return {ris.center, ris_aod_direction(ris, a)};
}

SolveResult solve_aod_halflines(const SolveRequest& req)
{
    const auto aods = of_kind(req.measurements, MeasurementKind::AoD);
    if (aods.size() < 2) throw Infeasible("half-line intersection needs two AoDs");

    std::string last_error;
    for (std::size_t i = 0; i < aods.size(); ++i)
        for (std::size_t j = i + 1; j < aods.size(); ++j) {
            try {
                const HalfLineFix fix =
                    solve_two_halflines(detail::aod_halfline(*aods[i], req.scenario),
                                        detail::aod_halfline(*aods[j], req.scenario));
                return detail::finish(req, {fix.position}, "aod-halflines");
            } catch (const NonIdentifiable& e) {
                last_error = e.what();
            } catch (const Infeasible& e) {
                last_error = e.what();
            }
        }
    throw Infeasible("no usable AoD half-line pair: " + last_error);
}

SolveResult solve_siso_1ris_1bs(const SolveRequest& req)
{
    const Scenario& s = req.scenario;
    const Measurement* aod = nullptr;
    for (const auto* m : of_kind(req.measurements, MeasurementKind::AoD))
        if (m->path.type == Path::Type::Reflected && !aod) aod = m;
    if (!aod) throw Infeasible("1 RIS + 1 BS positioning needs the RIS AoD");

    const std::size_t bs = aod->path.bs;
    const std::size_t ris = aod->path.ris;
    const Path direct = Path::direct(bs);
    const Path reflected = Path::reflected(bs, ris);

    // Extra path length of the reflection over the direct path, in meters.
    std::optional<double> delta;
    const Measurement *t_dir = nullptr, *t_ref = nullptr;
    for (const auto* m : of_kind(req.measurements, MeasurementKind::ToA)) {
        if (m->path == direct) t_dir = m;
        if (m->path == reflected) t_ref = m;
    }
    if (t_dir && t_ref) delta = kSpeedOfLight * (t_ref->value1 - t_dir->value1);
    for (const auto* m : of_kind(req.measurements, MeasurementKind::TDoA)) {
        if (delta || !m->reference) break;
        if (m->path == reflected && *m->reference == direct) delta = kSpeedOfLight * m->value1;
        if (m->path == direct && *m->reference == reflected) delta = -kSpeedOfLight * m->value1;
    }
    if (!delta) {
        if (s.is_blocked(s.bss.at(bs)))
            throw Infeasible(
                "direct path blocked: with one RIS and one BS the far-field position needs the direct/reflected "
                "delay difference; use nf_position_from_curvature when the UE is in the RIS near field");
        throw Infeasible("1 RIS + 1 BS positioning needs direct and reflected ToAs (or their TDoA)");
    }

    const Vec3 b = s.bss[bs].position;
    const Vec3 r = s.riss[ris].center;
    const Vec3 d = ris_aod_direction(s.riss[ris], AzEl{aod->value1, aod->value2});
    const Vec3 w = b - r;
    // |w - t d| = K + t with K = |w| - delta: the BS-UE distance along the half-line.
    const double k = w.norm() - *delta;
    const double den = 2.0 * (k + d.dot(w));
    if (std::abs(den) < 1e-12 * std::max(1.0, w.norm()))
        throw Infeasible("reflected-direct delay difference is inconsistent with the RIS AoD");
    const double t = (w.squaredNorm() - k * k) / den;
    if (t < 0.0 || k + t < 0.0)
        throw Infeasible("no point on the RIS AoD half-line matches the measured delay difference");
    return detail::finish(req, {r + t * d}, "siso-1ris-1bs");
}

SolveResult solve_siso_1ris_0bs(const SolveRequest& req)
{
    const Scenario& s = req.scenario;
    for (const auto* m : of_kind(req.measurements, MeasurementKind::RTT)) {
        if (m->path.type != Path::Type::Monostatic) continue;
        if (m->value1 < 0.0) throw Infeasible("negative round-trip time");
        for (const auto* a : of_kind(req.measurements, MeasurementKind::AoD)) {
            if (a->path.type == Path::Type::Direct || a->path.ris != m->path.ris) continue;
            const RisNode& ris = s.riss.at(m->path.ris);
            const Vec3 d = ris_aod_direction(ris, AzEl{a->value1, a->value2});
            return detail::finish(req, {ris.center + 0.5 * kSpeedOfLight * m->value1 * d}, "siso-1ris-0bs");
        }
    }
    throw Infeasible("1 RIS without a BS needs a monostatic RTT and the AoD of the same RIS");
}

namespace {

// Both intersection points of three spheres (one if they only touch).
std::vector<Vec3> trilaterate(const Vec3& p1, const Vec3& p2, const Vec3& p3, double r1, double r2, double r3)
{
    const double dist = (p2 - p1).norm();
    const Vec3 ex = (p2 - p1) / dist;
    const double i = ex.dot(p3 - p1);
    const Vec3 ey_raw = p3 - p1 - i * ex;
    if (ey_raw.norm() < 1e-9 * dist) throw NonIdentifiable("RTT anchors are collinear");
    const Vec3 ey = ey_raw.normalized();
    const Vec3 ez = ex.cross(ey);
    const double j = ey.dot(p3 - p1);
    const double x = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist);
    const double y = (r1 * r1 - r3 * r3 + i * i + j * j) / (2.0 * j) - i * x / j;
    const double z2 = r1 * r1 - x * x - y * y;
    const Vec3 base = p1 + x * ex + y * ey;
    if (z2 <= 0.0) return {base};
    const double z = std::sqrt(z2);
    return {base + z * ez, base - z * ez};
}

}  // namespace

SolveResult solve_tdoa_4bs(const SolveRequest& req)
{
    const Scenario& s = req.scenario;
    std::vector<const Measurement*> toas;
    for (const auto* m : of_kind(req.measurements, MeasurementKind::ToA))
        if (m->path.type == Path::Type::Direct) toas.push_back(m);
    std::vector<const Measurement*> tdoas;
    for (const auto* m : of_kind(req.measurements, MeasurementKind::TDoA))
        if (m->path.type == Path::Type::Direct && m->reference && m->reference->type == Path::Type::Direct)
            tdoas.push_back(m);

    Vec3 lo, hi;
    detail::scene_box(s, 1.5, 5.0, lo, hi);

    if (toas.size() >= 4 || tdoas.size() >= 3) {
        // Range differences in meters against a common reference.
        std::function<double(const Vec3&)> cost;
        if (toas.size() >= 4) {
            cost = [&](const Vec3& p) {
                const double l0 = (s.bss[toas[0]->path.bs].position - p).norm();
                double c = 0.0;
                for (std::size_t k = 1; k < toas.size(); ++k) {
                    const double l = (s.bss[toas[k]->path.bs].position - p).norm();
                    const double e = (l - l0) - kSpeedOfLight * (toas[k]->value1 - toas[0]->value1);
                    c += e * e;
                }
                return c;
            };
        } else {
            cost = [&](const Vec3& p) {
                double c = 0.0;
                for (const auto* m : tdoas) {
                    const double e = (s.bss[m->path.bs].position - p).norm() -
                                     (s.bss[m->reference->bs].position - p).norm() - kSpeedOfLight * m->value1;
                    c += e * e;
                }
                return c;
            };
        }
        return detail::finish(req, detail::grid_minima(lo, hi, req.grid_cell, 4, cost), "tdoa-4bs");
    }

    std::vector<const Measurement*> rtts;
    for (const auto* m : of_kind(req.measurements, MeasurementKind::RTT))
        if (m->path.type == Path::Type::Direct) rtts.push_back(m);
    if (rtts.size() >= 3) {
        const auto pos = [&](int k) { return s.bss[rtts[k]->path.bs].position; };
        const auto range = [&](int k) { return 0.5 * kSpeedOfLight * rtts[k]->value1; };
        return detail::finish(req, trilaterate(pos(0), pos(1), pos(2), range(0), range(1), range(2)), "rtt-3bs");
    }

    throw Infeasible(
        "the SISO row without RISs needs ToAs (or three TDoAs) from at least 4 BSs, or RTTs from at least 3 BSs");
}

}  // namespace risloc
