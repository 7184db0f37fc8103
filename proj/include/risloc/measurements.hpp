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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "risloc/scene.hpp"

namespace risloc {

/*!
 * A propagation path from the anchor network to the UE.
 *
 * Direct is BS to UE. Reflected is BS to RIS to UE. Monostatic is the
 * full-duplex UE to RIS to UE loop used when no BS is present; its
 * path_length is the one-way RIS-UE distance.
 */
struct Path
{
    enum class Type { Direct, Reflected, Monostatic };

    Type type = Type::Direct;
    std::size_t bs = 0;
    std::size_t ris = 0;

    static Path direct(std::size_t bs) { return {Type::Direct, bs, 0}; }
    static Path reflected(std::size_t bs, std::size_t ris) { return {Type::Reflected, bs, ris}; }
    static Path monostatic(std::size_t ris) { return {Type::Monostatic, 0, ris}; }

    bool operator==(const Path&) const = default;
};

/// "bs1", "bs1>ris2" or "ris2" (monostatic).
std::string path_label(const Path& p, const Scenario& s);
/// Inverse of path_label; throws ParseError for unknown ids.
Path path_from_label(const std::string& label, const Scenario& s);

/// Position of the last anchor before the UE (BS for direct paths, RIS otherwise).
Vec3 last_anchor(const Path& p, const Scenario& s);

double path_length(const Path& p, const Scenario& s, const UeState& u);
/// d(path_length)/d(UE position); also the velocity coefficient of the path-length rate.
Vec3 path_length_gradient(const Path& p, const Scenario& s, const UeState& u);

double toa(const Path& p, const Scenario& s, const UeState& u);
double rtt(const Path& p, const Scenario& s, const UeState& u);
double tdoa(const Path& a, const Path& b, const Scenario& s, const UeState& u);

/// AoD from a BS: direction to the UE in the BS frame (boresight +x).
AzEl aod(const BsNode& bs, const UeState& u);
/*!
 * AoD from an RIS in its boresight convention: with d the UE direction in the
 * RIS frame, az = atan2(d_x, d_z) and el = asin(d_y), so boresight (+z) maps
 * to (0, 0).
 */
AzEl aod(const RisNode& ris, const UeState& u);
/// Global unit direction of an RIS AoD (inverse of aod for RIS nodes).
Vec3 ris_aod_direction(const RisNode& ris, const AzEl& a);
/// Global unit direction of a BS AoD.
Vec3 bs_aod_direction(const BsNode& bs, const AzEl& a);

/// AoA at the UE from an anchor at `anchor`, in the UE frame.
AzEl aoa(const Vec3& anchor, const UeState& u);
AzEl aoa(const Path& p, const Scenario& s, const UeState& u);

/*!
 * Doppler shift in Hz, positive when the path shortens (UE approaching).
 * Anchors are static so only the last leg contributes; the monostatic loop
 * counts its leg twice.
 */
double doppler(const Path& p, const Scenario& s, const UeState& u);

struct Measurement
{
    MeasurementKind kind = MeasurementKind::ToA;
    Path path;
    std::optional<Path> reference;  // TDoA only
    double value1 = 0.0;            // s, Hz, or azimuth rad
    double value2 = 0.0;            // elevation rad for AoD/AoA
    double sigma = 0.0;             // 0 marks a noiseless value

    bool is_angle() const { return kind == MeasurementKind::AoD || kind == MeasurementKind::AoA; }
    int dim() const { return is_angle() ? 2 : 1; }
};

struct MeasurementSet
{
    std::vector<Measurement> items;
    std::uint64_t seed = 0;

    std::size_t count(MeasurementKind k) const;
};

/// Per-kind noise standard deviations (s, s, s, rad, rad, Hz).
struct NoiseSigmas
{
    double toa = 1e-9;
    double tdoa = 1e-9;
    double rtt = 1e-9;
    double aod = 1e-2;
    double aoa = 1e-2;
    double doppler = 1.0;

    double operator[](MeasurementKind k) const;
    double& operator[](MeasurementKind k);
    NoiseSigmas scaled(double f) const;
    static NoiseSigmas zero();
};

/// One (kind, link) slot the scenario measures; value fields left at zero.
std::vector<Measurement> measurement_plan(const Scenario& s);

/// Noise-free value(s) of a planned measurement at UE state u.
Eigen::Vector2d predict(const Measurement& m, const Scenario& s, const UeState& u);

/// Stacked residuals (model - measured), azimuths wrapped to (-pi, pi].
/// Elevation residuals are not wrapped.
Eigen::VectorXd residuals(const MeasurementSet& m, const Scenario& s, const UeState& u);
/// Standard deviation for each entry of residuals(); `fallback` replaces zero sigmas.
Eigen::VectorXd residual_sigmas(const MeasurementSet& m, const NoiseSigmas& fallback = {});

/*!
 * Simulates every planned measurement of `s` at `u` with independent
 * Gaussian noise. Sigma 0 reproduces the forward models exactly.
 */
MeasurementSet generate(const Scenario& s, const UeState& u, const NoiseSigmas& noise, std::uint64_t seed);

// CSV: kind,node,ref_node,value1,value2,sigma,seed
void write_csv(std::ostream& os, const MeasurementSet& m, const Scenario& s);
MeasurementSet read_csv(std::istream& is, const Scenario& s);

}  // namespace risloc
