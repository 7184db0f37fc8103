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

#include "risloc/measurements.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace risloc {

namespace {

const BsNode& bs_of(const Path& p, const Scenario& s)
{
    if (p.bs >= s.bss.size()) throw Error("path references missing BS index " + std::to_string(p.bs));
    return s.bss[p.bs];
}

const RisNode& ris_of(const Path& p, const Scenario& s)
{
    if (p.ris >= s.riss.size()) throw Error("path references missing RIS index " + std::to_string(p.ris));
    return s.riss[p.ris];
}

void require_wideband(const Scenario& s)
{
    if (s.signaling.kind != SignalingKind::WB) throw Infeasible(std::string(kRuleWideband));
}

std::string fmt_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string path_label(const Path& p, const Scenario& s)
{
    switch (p.type) {
    case Path::Type::Direct: return bs_of(p, s).id;
    case Path::Type::Reflected: return bs_of(p, s).id + ">" + ris_of(p, s).id;
    case Path::Type::Monostatic: return ris_of(p, s).id;
    }
    return {};
}

Path path_from_label(const std::string& label, const Scenario& s)
{
    auto find_bs = [&](const std::string& id) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < s.bss.size(); ++i)
            if (s.bss[i].id == id) return i;
        return std::nullopt;
    };
    auto find_ris = [&](const std::string& id) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < s.riss.size(); ++i)
            if (s.riss[i].id == id) return i;
        return std::nullopt;
    };
    const auto gt = label.find('>');
    if (gt != std::string::npos) {
        auto b = find_bs(label.substr(0, gt));
        auto r = find_ris(label.substr(gt + 1));
        if (!b || !r) throw ParseError("unknown path '" + label + "'");
        return Path::reflected(*b, *r);
    }
    if (auto b = find_bs(label)) return Path::direct(*b);
    if (auto r = find_ris(label)) return Path::monostatic(*r);
    throw ParseError("unknown node '" + label + "'");
}

Vec3 last_anchor(const Path& p, const Scenario& s)
{
    return p.type == Path::Type::Direct ? bs_of(p, s).position : ris_of(p, s).center;
}

double path_length(const Path& p, const Scenario& s, const UeState& u)
{
    switch (p.type) {
    case Path::Type::Direct: return (bs_of(p, s).position - u.position).norm();
    case Path::Type::Reflected: {
        const Vec3& r = ris_of(p, s).center;
        return (bs_of(p, s).position - r).norm() + (r - u.position).norm();
    }
    case Path::Type::Monostatic: return (ris_of(p, s).center - u.position).norm();
    }
    return 0.0;
}

Vec3 path_length_gradient(const Path& p, const Scenario& s, const UeState& u)
{
    return unit_direction(last_anchor(p, s), u.position);
}

double toa(const Path& p, const Scenario& s, const UeState& u)
{
    require_wideband(s);
    if (p.type == Path::Type::Monostatic) throw Infeasible("one-way delay is undefined on a monostatic path");
    return path_length(p, s, u) / kSpeedOfLight + u.clock_bias;
}

double rtt(const Path& p, const Scenario& s, const UeState& u)
{
    require_wideband(s);
    return 2.0 * path_length(p, s, u) / kSpeedOfLight;
}

double tdoa(const Path& a, const Path& b, const Scenario& s, const UeState& u)
{
    require_wideband(s);
    return (path_length(a, s, u) - path_length(b, s, u)) / kSpeedOfLight;
}

AzEl aod(const BsNode& bs, const UeState& u)
{
    const Vec3 d = u.position - bs.position;
    return direction_to_azel(global_to_local(rot_zyx(bs.orientation), d));
}

AzEl aod(const RisNode& ris, const UeState& u)
{
    const Vec3 d = global_to_local(rot_zyx(ris.orientation), Vec3(u.position - ris.center));
    return direction_to_azel(Vec3(d.z(), d.x(), d.y()));
}

Vec3 ris_aod_direction(const RisNode& ris, const AzEl& a)
{
    const Vec3 v = azel_to_direction(a);
    return local_to_global(rot_zyx(ris.orientation), Vec3(v.y(), v.z(), v.x()));
}

Vec3 bs_aod_direction(const BsNode& bs, const AzEl& a)
{
    return local_to_global(rot_zyx(bs.orientation), azel_to_direction(a));
}

AzEl aoa(const Vec3& anchor, const UeState& u)
{
    const Vec3 g = anchor - u.position;
    return direction_to_azel(global_to_local(rot_zyx(u.orientation), g));
}

AzEl aoa(const Path& p, const Scenario& s, const UeState& u) { return aoa(last_anchor(p, s), u); }

double doppler(const Path& p, const Scenario& s, const UeState& u)
{
    const double legs = p.type == Path::Type::Monostatic ? 2.0 : 1.0;
    return -legs * path_length_gradient(p, s, u).dot(u.velocity) / s.lambda();
}

std::size_t MeasurementSet::count(MeasurementKind k) const
{
    std::size_t n = 0;
    for (const auto& m : items) n += m.kind == k;
    return n;
}

double NoiseSigmas::operator[](MeasurementKind k) const { return const_cast<NoiseSigmas&>(*this)[k]; }

double& NoiseSigmas::operator[](MeasurementKind k)
{
    switch (k) {
    case MeasurementKind::ToA: return toa;
    case MeasurementKind::TDoA: return tdoa;
    case MeasurementKind::RTT: return rtt;
    case MeasurementKind::AoD: return aod;
    case MeasurementKind::AoA: return aoa;
    case MeasurementKind::Doppler: return doppler;
    }
    return toa;
}

NoiseSigmas NoiseSigmas::scaled(double f) const
{
    return {toa * f, tdoa * f, rtt * f, aod * f, aoa * f, doppler * f};
}

NoiseSigmas NoiseSigmas::zero() { return {0, 0, 0, 0, 0, 0}; }

std::vector<Measurement> measurement_plan(const Scenario& s)
{
    std::vector<Path> direct;
    for (std::size_t b = 0; b < s.bss.size(); ++b)
        if (!s.is_blocked(s.bss[b])) direct.push_back(Path::direct(b));

    std::vector<Path> one_way = direct;
    for (std::size_t b = 0; b < s.bss.size(); ++b)
        for (std::size_t r = 0; r < s.riss.size(); ++r) one_way.push_back(Path::reflected(b, r));

    // The path an RIS is observed through: illuminated by the first BS, or by the UE itself.
    std::vector<Path> via_ris;
    for (std::size_t r = 0; r < s.riss.size(); ++r)
        via_ris.push_back(s.bss.empty() ? Path::monostatic(r) : Path::reflected(0, r));

    std::vector<Measurement> plan;
    auto add = [&](MeasurementKind k, const Path& p, std::optional<Path> ref = std::nullopt) {
        Measurement m;
        m.kind = k;
        m.path = p;
        m.reference = ref;
        plan.push_back(m);
    };

    for (MeasurementKind k : s.measurement_mix) {
        switch (k) {
        case MeasurementKind::ToA:
            for (const auto& p : one_way) add(k, p);
            break;
        case MeasurementKind::TDoA:
            for (std::size_t i = 1; i < one_way.size(); ++i) add(k, one_way[i], one_way[0]);
            break;
        case MeasurementKind::RTT:
            for (const auto& p : direct) add(k, p);
            if (s.bss.empty())
                for (const auto& p : via_ris) add(k, p);
            break;
        case MeasurementKind::AoD:
            for (const auto& p : direct)
                if (s.bss[p.bs].antenna.is_array) add(k, p);
            for (const auto& p : via_ris) add(k, p);
            break;
        case MeasurementKind::AoA:
            if (!s.ue_antenna.is_array) break;
            for (const auto& p : direct) add(k, p);
            for (const auto& p : via_ris) add(k, p);
            break;
        case MeasurementKind::Doppler:
            for (const auto& p : direct) add(k, p);
            if (s.bss.empty()) {
                for (const auto& p : via_ris) add(k, p);
            } else {
                for (const auto& p : one_way)
                    if (p.type == Path::Type::Reflected) add(k, p);
            }
            break;
        }
    }
    return plan;
}

Eigen::Vector2d predict(const Measurement& m, const Scenario& s, const UeState& u)
{
    switch (m.kind) {
    case MeasurementKind::ToA: return {toa(m.path, s, u), 0.0};
    case MeasurementKind::TDoA:
        if (!m.reference) throw Error("TDoA measurement without a reference path");
        return {tdoa(m.path, *m.reference, s, u), 0.0};
    case MeasurementKind::RTT: return {rtt(m.path, s, u), 0.0};
    case MeasurementKind::AoD: {
        const AzEl a = m.path.type == Path::Type::Direct ? aod(bs_of(m.path, s), u) : aod(ris_of(m.path, s), u);
        return {a.azimuth, a.elevation};
    }
    case MeasurementKind::AoA: {
        const AzEl a = aoa(m.path, s, u);
        return {a.azimuth, a.elevation};
    }
    case MeasurementKind::Doppler: return {doppler(m.path, s, u), 0.0};
    }
    return Eigen::Vector2d::Zero();
}

Eigen::VectorXd residuals(const MeasurementSet& m, const Scenario& s, const UeState& u)
{
    std::size_t n = 0;
    for (const auto& x : m.items) n += static_cast<std::size_t>(x.dim());
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    Eigen::Index i = 0;
    for (const auto& x : m.items) {
        const Eigen::Vector2d p = predict(x, s, u);
        if (x.is_angle()) {
            r[i++] = wrap_angle(p[0] - x.value1);
            r[i++] = p[1] - x.value2;
        } else {
            r[i++] = p[0] - x.value1;
        }
    }
    return r;
}

Eigen::VectorXd residual_sigmas(const MeasurementSet& m, const NoiseSigmas& fallback)
{
    std::vector<double> out;
    for (const auto& x : m.items) {
        const double sg = x.sigma > 0.0 ? x.sigma : fallback[x.kind];
        for (int k = 0; k < x.dim(); ++k) out.push_back(sg);
    }
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

MeasurementSet generate(const Scenario& s, const UeState& u, const NoiseSigmas& noise, std::uint64_t seed)
{
    if (auto v = validate(s); !v.empty()) throw Infeasible("invalid scenario:\n" + format_violations(v));

    MeasurementSet out;
    out.seed = seed;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    for (Measurement m : measurement_plan(s)) {
        const Eigen::Vector2d v = predict(m, s, u);
        m.sigma = noise[m.kind];
        m.value1 = v[0];
        m.value2 = v[1];
        if (m.sigma > 0.0) {
            if (m.is_angle()) {
                double az = m.value1 + m.sigma * normal(rng);
                double el = m.value2 + m.sigma * normal(rng);
                // Continue over the pole instead of clipping.
                if (el > kPi / 2) {
                    el = kPi - el;
                    az += kPi;
                } else if (el < -kPi / 2) {
                    el = -kPi - el;
                    az += kPi;
                }
                m.value1 = wrap_angle(az);
                m.value2 = el;
            } else {
                m.value1 += m.sigma * normal(rng);
            }
        }
        out.items.push_back(m);
    }
    return out;
}

void write_csv(std::ostream& os, const MeasurementSet& m, const Scenario& s)
{
    os << "kind,node,ref_node,value1,value2,sigma,seed\n";
    for (const auto& x : m.items) {
        os << to_string(x.kind) << ',' << path_label(x.path, s) << ','
           << (x.reference ? path_label(*x.reference, s) : std::string()) << ',' << fmt_double(x.value1) << ','
           << fmt_double(x.value2) << ',' << fmt_double(x.sigma) << ',' << m.seed << '\n';
    }
}

MeasurementSet read_csv(std::istream& is, const Scenario& s)
{
    MeasurementSet out;
    std::string line;
    bool header = false;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "kind,node,ref_node,value1,value2,sigma,seed")
                throw ParseError("line " + std::to_string(lineno) + ": unexpected measurement CSV header");
            header = true;
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
        if (cols.size() == 6 && !line.empty() && line.back() == ',') cols.emplace_back();
        if (cols.size() != 7) throw ParseError("line " + std::to_string(lineno) + ": expected 7 columns");
        try {
            Measurement m;
            m.kind = measurement_kind_from_string(cols[0]);
            m.path = path_from_label(cols[1], s);
            if (!cols[2].empty()) m.reference = path_from_label(cols[2], s);
            m.value1 = std::stod(cols[3]);
            m.value2 = std::stod(cols[4]);
            m.sigma = std::stod(cols[5]);
            out.seed = std::stoull(cols[6]);
            out.items.push_back(m);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(lineno) + ": malformed number");
        }
    }
    if (!header) throw ParseError("measurement CSV has no header");
    return out;
}

}  // namespace risloc
