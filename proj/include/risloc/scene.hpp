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

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "risloc/geometry.hpp"

namespace risloc {

enum class MeasurementKind { ToA, TDoA, RTT, AoD, AoA, Doppler };

std::string_view to_string(MeasurementKind k);
/// Throws ParseError on an unknown name.
MeasurementKind measurement_kind_from_string(std::string_view name);

/// Delay-class measurements need wideband signaling.
inline bool is_delay_kind(MeasurementKind k)
{
    return k == MeasurementKind::ToA || k == MeasurementKind::TDoA || k == MeasurementKind::RTT;
}

struct UeState
{
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    double clock_bias = 0.0;  // seconds
    EulerZYX orientation;
};

/// Single antenna, or a uniform planar array of nx by ny elements.
struct Antenna
{
    bool is_array = false;
    int nx = 1;
    int ny = 1;
    double spacing = 0.0;  // m

    static Antenna single() { return {}; }
    static Antenna array(int nx, int ny, double spacing) { return {true, nx, ny, spacing}; }
    bool operator==(const Antenna&) const = default;
};

/// Base station. Local boresight is +x.
struct BsNode
{
    std::string id;
    Vec3 position = Vec3::Zero();
    EulerZYX orientation;
    Antenna antenna;
};

/*!
 * Reconfigurable intelligent surface.
 *
 * Elements sit on a planar lattice in the local xy-plane, centered on
 * `center`, with boresight along local +z. `phase_profile` holds one phase
 * per element in [0, 2 pi), row-major over (iy, ix).
 */
struct RisNode
{
    std::string id;
    Vec3 center = Vec3::Zero();
    EulerZYX orientation;
    int nx = 1;
    int ny = 1;
    double spacing = 0.0;  // m
    std::vector<double> phase_profile;

    std::size_t num_elements() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

enum class SignalingKind { WB, NB };

struct Signaling
{
    SignalingKind kind = SignalingKind::NB;
    double bandwidth_hz = 0.0;  // only meaningful for WB

    static Signaling wideband(double bw) { return {SignalingKind::WB, bw}; }
    static Signaling narrowband() { return {SignalingKind::NB, 0.0}; }
};

struct Scenario
{
    std::string name;
    int table_row = 0;  // 1..10 for the identifiability gallery, 0 otherwise
    std::vector<BsNode> bss;
    std::vector<RisNode> riss;
    Signaling signaling;
    Antenna ue_antenna;
    double carrier_hz = 0.0;
    std::set<MeasurementKind> measurement_mix;
    std::set<std::string> los_blocked;  // BS ids whose direct BS-UE link is blocked

    bool has(MeasurementKind k) const { return measurement_mix.count(k) != 0; }
    bool is_blocked(const BsNode& bs) const { return los_blocked.count(bs.id) != 0; }
    double lambda() const { return wavelength(carrier_hz); }
};

/// A scenario document: the scene plus an optional ground-truth user state.
struct ScenarioFile
{
    Scenario scenario;
    std::optional<UeState> ue;
};

struct Violation
{
    std::string field;
    std::string rule;
};

inline constexpr std::string_view kRuleWideband = "ToA-class measurement requires WB";
inline constexpr std::string_view kRuleNoAnchors = "no anchors";

/// Empty iff every scenario invariant holds.
std::vector<Violation> validate(const Scenario& s);
std::string format_violations(const std::vector<Violation>& v);

/// Global positions of the RIS elements, row-major over (iy, ix).
std::vector<Vec3> ris_element_positions(const RisNode& r);

/// Element spacing equal to half a wavelength at the carrier.
inline double half_wavelength(double carrier_hz) { return 0.5 * wavelength(carrier_hz); }

// Scenario documents are JSON. The schema is described in docs/scenario-format.md.
ScenarioFile parse_scenario(std::string_view text);
std::string dump_scenario(const ScenarioFile& f);
ScenarioFile load(const std::string& path);
void save(const ScenarioFile& f, const std::string& path);

bool operator==(const UeState& a, const UeState& b);
bool operator==(const BsNode& a, const BsNode& b);
bool operator==(const RisNode& a, const RisNode& b);
bool operator==(const Scenario& a, const Scenario& b);
bool operator==(const ScenarioFile& a, const ScenarioFile& b);

}  // namespace risloc
