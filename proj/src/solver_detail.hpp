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
#include <string>
#include <vector>

#include "risloc/solvers.hpp"

namespace risloc::detail {

/// Measurements of one kind, in set order.
std::vector<const Measurement*> of_kind(const MeasurementSet& m, MeasurementKind k);

/// Half-line of an AoD measurement from its BS or RIS.
HalfLine aod_halfline(const Measurement& m, const Scenario& s);

/// Fallback sigmas with non-positive entries replaced by the defaults.
NoiseSigmas positive(const NoiseSigmas& fallback);

double sigma_of(const Measurement& m, const NoiseSigmas& fallback);

/// Seeds the nuisance blocks at each candidate position, refines, and ranks the results.
SolveResult finish(const SolveRequest& req, const std::vector<Vec3>& positions, std::string method);

/// Bounding box of all anchors grown by `grow` about its center, with each half-extent at least `min_half`.
/*!
 * Lowest local minima of `cost` on a uniform grid over [lo, hi] with the
 * given cell, at most `keep` of them, best first. The cell grows if needed to
 * keep the grid under `max_per_axis` points along any axis.
 */
std::vector<Vec3> grid_minima(const Vec3& lo, const Vec3& hi, double cell, int keep,
                              const std::function<double(const Vec3&)>& cost, int max_per_axis = 160);

void scene_box(const Scenario& s, double grow, double min_half, Vec3& lo, Vec3& hi);

}  // namespace risloc::detail
