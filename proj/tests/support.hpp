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

// Shared fixtures for the test binaries.

#pragma once

#include <cmath>
#include <random>
#include <string>

#include "risloc/constants.hpp"
#include "risloc/measurements.hpp"
#include "risloc/scene.hpp"

namespace risloc::testing {

inline std::string gallery_path(const std::string& file) { return std::string(RISLOC_GALLERY_DIR) + "/" + file; }

inline const char* const kRowFiles[10] = {
    "row01_siso_0ris_4bs.json", "row02_siso_1ris_1bs.json", "row03_siso_2ris_1bs.json",
    "row04_siso_1ris_0bs.json", "row05_miso_0ris_2bs.json", "row06_miso_1ris_1bs.json",
    "row07_simo_0ris_3bs.json", "row08_simo_1ris_1bs.json", "row09_mimo_0ris_2bs.json",
    "row10_mimo_1ris_1bs.json",
};

inline ScenarioFile load_row(int row) { return load(gallery_path(kRowFiles[row - 1])); }

inline Vec3 random_vec(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng), u(rng), u(rng)};
}

inline EulerZYX random_euler(std::mt19937_64& rng, double beta_max = 1.4)
{
    std::uniform_real_distribution<double> a(-kPi, kPi), b(-beta_max, beta_max);
    return {a(rng), b(rng), a(rng)};
}

/// Single-antenna wideband scene with BSs at the given positions.
inline Scenario bs_scene(const std::vector<Vec3>& positions, std::set<MeasurementKind> mix)
{
    Scenario s;
    s.name = "test";
    s.carrier_hz = 28e9;
    s.signaling = Signaling::wideband(400e6);
    s.measurement_mix = std::move(mix);
    for (std::size_t k = 0; k < positions.size(); ++k) {
        BsNode b;
        b.id = "bs" + std::to_string(k + 1);
        b.position = positions[k];
        s.bss.push_back(b);
    }
    return s;
}

/// 8 x 8 half-wavelength RIS at `center`, boresight along the global +y axis.
inline RisNode ris_facing_y(const std::string& id, const Vec3& center, double carrier_hz, int nx = 8, int ny = 8)
{
    RisNode r;
    r.id = id;
    r.center = center;
    r.orientation = {0.0, 0.0, -kPi / 2};
    r.nx = nx;
    r.ny = ny;
    r.spacing = half_wavelength(carrier_hz);
    r.phase_profile.assign(r.num_elements(), 0.0);
    return r;
}

}  // namespace risloc::testing
