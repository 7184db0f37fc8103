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

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "risloc/scene.hpp"

namespace risloc {

/// Per-element RIS phases in radians, stored mod 2 pi, row-major like ris_element_positions.
using PhaseProfile = Eigen::VectorXd;
using cdouble = std::complex<double>;

PhaseProfile phase_profile_of(const RisNode& r);
/// Wraps every entry to [0, 2 pi).
PhaseProfile wrap_profile(PhaseProfile p);

/*!
 * Near-field response: the sum over elements of
 * exp(-j 2 pi (d_src,e + d_e,ue) / lambda + j phase_e) / (d_src,e * d_e,ue).
 * Throws DegenerateDirection when the source or the UE sits on an element.
 */
cdouble nf_received(const Vec3& source, const RisNode& ris, const Vec3& ue, const PhaseProfile& profile,
                    double lambda);

/// Plane-wave approximation of nf_received around the RIS center.
cdouble ff_received(const Vec3& source, const RisNode& ris, const Vec3& ue, const PhaseProfile& profile,
                    double lambda);

/// Scenario forms: first BS as source, RIS by index, scenario carrier.
cdouble nf_received(const Scenario& s, std::size_t ris, const Vec3& ue, const PhaseProfile& profile);
cdouble ff_received(const Scenario& s, std::size_t ris, const Vec3& ue, const PhaseProfile& profile);

/// Element phases that steer the far-field reflection from `incident_from` toward `target` (RIS AoD).
PhaseProfile steering_profile(const RisNode& ris, const AzEl& target, const Vec3& incident_from, double lambda);

struct Codebook
{
    std::vector<PhaseProfile> profiles;
    std::vector<AzEl> labels;  // RIS AoD convention, strictly increasing azimuth

    std::size_t size() const { return profiles.size(); }
};

/*!
 * n_beams far-field steering beams at elevation 0 with azimuth labels equally
 * spaced over [-az_span/2, az_span/2] (a single beam points at broadside).
 * Without `incident_from` the illumination is assumed to arrive along the
 * RIS boresight.
 */
Codebook make_codebook(const RisNode& ris, int n_beams, double az_span, double lambda,
                       std::optional<Vec3> incident_from = std::nullopt);

struct GridSpec
{
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;
    double step = 0.01;
    double z = 0.0;  // height of the scene plane

    int cols() const;
    int rows() const;
    Vec3 cell_center(int row, int col) const;
};

struct PowerMap
{
    GridSpec grid;
    Eigen::MatrixXd score;                    // rows x cols, entries in [0, #RIS]
    std::vector<Eigen::VectorXd> beam_power;  // per RIS, normalized to max 1
    std::vector<int> best_beam;               // per RIS
    int best_row = 0;
    int best_col = 0;
    Vec3 estimate = Vec3::Zero();
};

/*!
 * Beam-sweep localization with two (or more) RISs.
 *
 * Each RIS sweeps its codebook; the UE measures the near-field response of
 * every beam with additive circular Gaussian noise of standard deviation
 * `noise_sigma` on the complex amplitude. Powers are normalized per RIS by
 * their maximum. A grid cell scores the sum over RISs of the normalized power
 * of the beam whose label is nearest to the cell's azimuth from that RIS. The
 * estimate is the best cell, ties broken by lowest (row, col).
 */
PowerMap beam_sweep_estimate(const Scenario& s, const UeState& truth, const std::vector<Codebook>& codebooks,
                             const GridSpec& grid, double noise_sigma, std::uint64_t seed);

/// Largest noiseless beam amplitude over all RISs and beams; the SNR reference of a sweep.
double sweep_peak_amplitude(const Scenario& s, const UeState& truth, const std::vector<Codebook>& codebooks);

// x,y,score
void write_power_map_csv(std::ostream& os, const PowerMap& m);
// beam,az,el,phase_0,...,phase_{n-1}
void write_codebook_csv(std::ostream& os, const Codebook& c);

/// 2 D^2 / lambda with D the RIS aperture diagonal.
double fraunhofer_distance(const RisNode& ris, double lambda);

}  // namespace risloc
