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

#include "risloc/scene.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace risloc {

using json = nlohmann::json;

namespace {

constexpr std::pair<MeasurementKind, std::string_view> kKindNames[] = {
    {MeasurementKind::ToA, "ToA"}, {MeasurementKind::TDoA, "TDoA"},     {MeasurementKind::RTT, "RTT"},
    {MeasurementKind::AoD, "AoD"}, {MeasurementKind::AoA, "AoA"}, {MeasurementKind::Doppler, "Doppler"},
};

bool finite(const Vec3& v) { return v.allFinite(); }
bool finite(const EulerZYX& e) { return std::isfinite(e.alpha) && std::isfinite(e.beta) && std::isfinite(e.gamma); }

void check_antenna(const Antenna& a, const std::string& field, std::vector<Violation>& out)
{
    if (!a.is_array) return;
    if (a.nx < 1 || a.ny < 1) out.push_back({field, "array dims must be >= 1"});
    if (!(a.spacing > 0.0)) out.push_back({field, "array spacing must be > 0"});
}

void check_orientation(const EulerZYX& e, const std::string& field, std::vector<Violation>& out)
{
    if (!finite(e)) {
        out.push_back({field, "orientation must be finite"});
        return;
    }
    const bool ok = e.alpha > -kPi && e.alpha <= kPi && e.beta >= -kPi / 2 && e.beta <= kPi / 2 &&
                    e.gamma > -kPi && e.gamma <= kPi;
    if (!ok) out.push_back({field, "orientation outside canonical ZYX ranges"});
}

}  // namespace

std::string_view to_string(MeasurementKind k)
{
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "?";
}

MeasurementKind measurement_kind_from_string(std::string_view name)
{
    for (const auto& [kind, n] : kKindNames)
        if (n == name) return kind;
    throw ParseError("unknown measurement kind '" + std::string(name) + "'");
}

std::vector<Violation> validate(const Scenario& s)
{
    std::vector<Violation> out;
    if (s.bss.empty() && s.riss.empty()) out.push_back({"bss/riss", std::string(kRuleNoAnchors)});
    if (!(s.carrier_hz > 0.0) || !std::isfinite(s.carrier_hz))
        out.push_back({"carrier_hz", "carrier frequency must be positive"});
    if (s.signaling.kind == SignalingKind::WB && !(s.signaling.bandwidth_hz > 0.0))
        out.push_back({"signaling.bandwidth_hz", "WB signaling needs a positive bandwidth"});
    if (s.measurement_mix.empty()) out.push_back({"measurement_mix", "measurement mix is empty"});

    for (MeasurementKind k : s.measurement_mix) {
        if (is_delay_kind(k) && s.signaling.kind != SignalingKind::WB)
            out.push_back({"measurement_mix." + std::string(to_string(k)), std::string(kRuleWideband)});
    }

    std::set<std::string> ids;
    for (std::size_t i = 0; i < s.bss.size(); ++i) {
        const auto& b = s.bss[i];
        const std::string field = "bss[" + std::to_string(i) + "]";
        if (b.id.empty()) out.push_back({field + ".id", "id must be nonempty"});
        if (!ids.insert(b.id).second) out.push_back({field + ".id", "duplicate node id '" + b.id + "'"});
        if (!finite(b.position)) out.push_back({field + ".position", "position must be finite"});
        check_orientation(b.orientation, field + ".orientation", out);
        check_antenna(b.antenna, field + ".antenna", out);
    }
    for (std::size_t i = 0; i < s.riss.size(); ++i) {
        const auto& r = s.riss[i];
        const std::string field = "riss[" + std::to_string(i) + "]";
        if (r.id.empty()) out.push_back({field + ".id", "id must be nonempty"});
        if (!ids.insert(r.id).second) out.push_back({field + ".id", "duplicate node id '" + r.id + "'"});
        if (!finite(r.center)) out.push_back({field + ".center", "center must be finite"});
        check_orientation(r.orientation, field + ".orientation", out);
        if (r.nx < 1 || r.ny < 1) out.push_back({field + ".grid", "grid dims must be >= 1"});
        if (!(r.spacing > 0.0)) out.push_back({field + ".spacing", "element spacing must be > 0"});
        if (r.phase_profile.size() != r.num_elements())
            out.push_back({field + ".phase_profile", "phase profile length must equal nx*ny"});
        for (double p : r.phase_profile) {
            if (!(p >= 0.0 && p < kTwoPi)) {
                out.push_back({field + ".phase_profile", "phase entries must lie in [0, 2pi)"});
                break;
            }
        }
    }
    check_antenna(s.ue_antenna, "ue_antenna", out);

    for (const auto& id : s.los_blocked) {
        bool found = false;
        for (const auto& b : s.bss) found = found || b.id == id;
        if (!found) out.push_back({"los_blocked", "blocked link names unknown BS '" + id + "'"});
    }

    if ((s.has(MeasurementKind::ToA) || s.has(MeasurementKind::TDoA)) && s.bss.empty())
        out.push_back({"measurement_mix", "one-way delays need at least one BS"});
    if (s.has(MeasurementKind::AoD)) {
        bool any_source = !s.riss.empty();
        for (const auto& b : s.bss) any_source = any_source || (b.antenna.is_array && !s.is_blocked(b));
        if (!any_source) out.push_back({"measurement_mix.AoD", "AoD requires a BS with an array or an RIS"});
    }
    if (s.has(MeasurementKind::AoA) && !s.ue_antenna.is_array)
        out.push_back({"measurement_mix.AoA", "AoA requires a UE array"});
    return out;
}

std::string format_violations(const std::vector<Violation>& v)
{
    std::ostringstream os;
    for (const auto& x : v) os << x.field << ": " << x.rule << "\n";
    return os.str();
}

std::vector<Vec3> ris_element_positions(const RisNode& r)
{
    const Rot3 rot = rot_zyx(r.orientation);
    std::vector<Vec3> out;
    out.reserve(r.num_elements());
    const double cx = 0.5 * (r.nx - 1);
    const double cy = 0.5 * (r.ny - 1);
    for (int iy = 0; iy < r.ny; ++iy) {
        for (int ix = 0; ix < r.nx; ++ix) {
            const Vec3 local((ix - cx) * r.spacing, (iy - cy) * r.spacing, 0.0);
            out.push_back(r.center + rot * local);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json euler_to_json(const EulerZYX& e) { return json::array({e.alpha, e.beta, e.gamma}); }

json antenna_to_json(const Antenna& a)
{
    if (!a.is_array) return json{{"type", "single"}};
    return json{{"type", "array"}, {"nx", a.nx}, {"ny", a.ny}, {"spacing", a.spacing}};
}

const json& require(const json& j, const char* key, const std::string& ctx)
{
    if (!j.is_object() || !j.contains(key)) throw ParseError("missing field '" + ctx + key + "'");
    return j.at(key);
}

template <typename T>
T get_as(const json& j, const std::string& ctx)
{
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ParseError("field '" + ctx + "': " + e.what());
    }
}

Vec3 vec_from_json(const json& j, const std::string& ctx)
{
    if (!j.is_array() || j.size() != 3) throw ParseError("field '" + ctx + "': expected an array of 3 numbers");
    return {get_as<double>(j[0], ctx), get_as<double>(j[1], ctx), get_as<double>(j[2], ctx)};
}

EulerZYX euler_from_json(const json& j, const std::string& ctx)
{
    const Vec3 v = vec_from_json(j, ctx);
    return {v.x(), v.y(), v.z()};
}

Antenna antenna_from_json(const json& j, const std::string& ctx)
{
    const auto type = get_as<std::string>(require(j, "type", ctx + "."), ctx + ".type");
    if (type == "single") return Antenna::single();
    if (type != "array") throw ParseError("field '" + ctx + ".type': unknown antenna type '" + type + "'");
    return Antenna::array(get_as<int>(require(j, "nx", ctx + "."), ctx + ".nx"),
                          get_as<int>(require(j, "ny", ctx + "."), ctx + ".ny"),
                          get_as<double>(require(j, "spacing", ctx + "."), ctx + ".spacing"));
}

json ue_to_json(const UeState& u)
{
    return json{{"position", vec_to_json(u.position)},
                {"velocity", vec_to_json(u.velocity)},
                {"clock_bias", u.clock_bias},
                {"orientation", euler_to_json(u.orientation)}};
}

UeState ue_from_json(const json& j)
{
    UeState u;
    u.position = vec_from_json(require(j, "position", "ue."), "ue.position");
    if (j.contains("velocity")) u.velocity = vec_from_json(j["velocity"], "ue.velocity");
    if (j.contains("clock_bias")) u.clock_bias = get_as<double>(j["clock_bias"], "ue.clock_bias");
    if (j.contains("orientation")) u.orientation = euler_from_json(j["orientation"], "ue.orientation");
    return u;
}

std::size_t line_of_offset(std::string_view text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError("line 1: scenario document must be an object");

    ScenarioFile f;
    Scenario& s = f.scenario;
    if (j.contains("name")) s.name = get_as<std::string>(j["name"], "name");
    if (j.contains("table_row")) s.table_row = get_as<int>(j["table_row"], "table_row");
    s.carrier_hz = get_as<double>(require(j, "carrier_hz", ""), "carrier_hz");

    const json& sig = require(j, "signaling", "");
    const auto kind = get_as<std::string>(require(sig, "kind", "signaling."), "signaling.kind");
    if (kind == "WB") {
        s.signaling = Signaling::wideband(get_as<double>(require(sig, "bandwidth_hz", "signaling."),
                                                         "signaling.bandwidth_hz"));
    } else if (kind == "NB") {
        s.signaling = Signaling::narrowband();
    } else {
        throw ParseError("field 'signaling.kind': expected WB or NB, got '" + kind + "'");
    }

    if (j.contains("ue_antenna")) s.ue_antenna = antenna_from_json(j["ue_antenna"], "ue_antenna");

    const json& mix = require(j, "measurement_mix", "");
    if (!mix.is_array()) throw ParseError("field 'measurement_mix': expected an array");
    for (const auto& m : mix) s.measurement_mix.insert(measurement_kind_from_string(get_as<std::string>(m, "measurement_mix")));

    if (j.contains("los_blocked"))
        for (const auto& id : j["los_blocked"]) s.los_blocked.insert(get_as<std::string>(id, "los_blocked"));

    const json& bss = require(j, "bss", "");
    if (!bss.is_array()) throw ParseError("field 'bss': expected an array");
    for (std::size_t i = 0; i < bss.size(); ++i) {
        const std::string ctx = "bss[" + std::to_string(i) + "]";
        BsNode b;
        b.id = get_as<std::string>(require(bss[i], "id", ctx + "."), ctx + ".id");
        b.position = vec_from_json(require(bss[i], "position", ctx + "."), ctx + ".position");
        if (bss[i].contains("orientation")) b.orientation = euler_from_json(bss[i]["orientation"], ctx + ".orientation");
        if (bss[i].contains("antenna")) b.antenna = antenna_from_json(bss[i]["antenna"], ctx + ".antenna");
        s.bss.push_back(std::move(b));
    }

    const json& riss = require(j, "riss", "");
    if (!riss.is_array()) throw ParseError("field 'riss': expected an array");
    for (std::size_t i = 0; i < riss.size(); ++i) {
        const std::string ctx = "riss[" + std::to_string(i) + "]";
        RisNode r;
        r.id = get_as<std::string>(require(riss[i], "id", ctx + "."), ctx + ".id");
        r.center = vec_from_json(require(riss[i], "center", ctx + "."), ctx + ".center");
        if (riss[i].contains("orientation")) r.orientation = euler_from_json(riss[i]["orientation"], ctx + ".orientation");
        const json& grid = require(riss[i], "grid", ctx + ".");
        if (!grid.is_array() || grid.size() != 2) throw ParseError("field '" + ctx + ".grid': expected [nx, ny]");
        r.nx = get_as<int>(grid[0], ctx + ".grid");
        r.ny = get_as<int>(grid[1], ctx + ".grid");
        r.spacing = riss[i].contains("spacing") ? get_as<double>(riss[i]["spacing"], ctx + ".spacing")
                                                : half_wavelength(s.carrier_hz);
        if (riss[i].contains("phase_profile")) {
            r.phase_profile = get_as<std::vector<double>>(riss[i]["phase_profile"], ctx + ".phase_profile");
        } else if (r.nx > 0 && r.ny > 0) {
            r.phase_profile.assign(r.num_elements(), 0.0);
        }
        s.riss.push_back(std::move(r));
    }

    if (j.contains("ue")) f.ue = ue_from_json(j["ue"]);
    return f;
}

std::string dump_scenario(const ScenarioFile& f)
{
    const Scenario& s = f.scenario;
    json j;
    j["name"] = s.name;
    j["table_row"] = s.table_row;
    j["carrier_hz"] = s.carrier_hz;
    j["signaling"] = s.signaling.kind == SignalingKind::WB
                         ? json{{"kind", "WB"}, {"bandwidth_hz", s.signaling.bandwidth_hz}}
                         : json{{"kind", "NB"}};
    j["ue_antenna"] = antenna_to_json(s.ue_antenna);
    j["measurement_mix"] = json::array();
    for (auto k : s.measurement_mix) j["measurement_mix"].push_back(std::string(to_string(k)));
    j["los_blocked"] = json::array();
    for (const auto& id : s.los_blocked) j["los_blocked"].push_back(id);
    j["bss"] = json::array();
    for (const auto& b : s.bss) {
        j["bss"].push_back({{"id", b.id},
                            {"position", vec_to_json(b.position)},
                            {"orientation", euler_to_json(b.orientation)},
                            {"antenna", antenna_to_json(b.antenna)}});
    }
    j["riss"] = json::array();
    for (const auto& r : s.riss) {
        j["riss"].push_back({{"id", r.id},
                             {"center", vec_to_json(r.center)},
                             {"orientation", euler_to_json(r.orientation)},
                             {"grid", json::array({r.nx, r.ny})},
                             {"spacing", r.spacing},
                             {"phase_profile", r.phase_profile}});
    }
    if (f.ue) j["ue"] = ue_to_json(*f.ue);
    return j.dump(2) + "\n";
}

ScenarioFile load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save(const ScenarioFile& f, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write scenario file '" + path + "'");
    out << dump_scenario(f);
    if (!out) throw Error("failed writing scenario file '" + path + "'");
}

bool operator==(const UeState& a, const UeState& b)
{
    return a.position == b.position && a.velocity == b.velocity && a.clock_bias == b.clock_bias &&
           a.orientation == b.orientation;
}

bool operator==(const BsNode& a, const BsNode& b)
{
    return a.id == b.id && a.position == b.position && a.orientation == b.orientation && a.antenna == b.antenna;
}

bool operator==(const RisNode& a, const RisNode& b)
{
    return a.id == b.id && a.center == b.center && a.orientation == b.orientation && a.nx == b.nx &&
           a.ny == b.ny && a.spacing == b.spacing && a.phase_profile == b.phase_profile;
}

bool operator==(const Scenario& a, const Scenario& b)
{
    return a.name == b.name && a.table_row == b.table_row && a.bss == b.bss && a.riss == b.riss &&
           a.signaling.kind == b.signaling.kind && a.signaling.bandwidth_hz == b.signaling.bandwidth_hz &&
           a.ue_antenna == b.ue_antenna && a.carrier_hz == b.carrier_hz &&
           a.measurement_mix == b.measurement_mix && a.los_blocked == b.los_blocked;
}

bool operator==(const ScenarioFile& a, const ScenarioFile& b) { return a.scenario == b.scenario && a.ue == b.ue; }

}  // namespace risloc
