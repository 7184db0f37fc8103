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

#include "risloc/identifiability.hpp"
#include "risloc/measurements.hpp"
#include "risloc/scene.hpp"
#include "risloc/signal.hpp"

namespace risloc {

struct SolveRequest
{
    Scenario scenario;
    MeasurementSet measurements;
    UnknownMask unknowns;
    std::optional<UeState> initial;
    /// Sigmas used for measurements recorded with sigma 0 (noiseless sets).
    NoiseSigmas fallback_sigmas;
    /// Cell size of the coarse initialization grid, meters.
    double grid_cell = 1.0;
};

struct Candidate
{
    UeState state;
    double residual = 0.0;
};

struct SolveResult
{
    UeState estimate;
    UnknownMask estimated;  // components actually recovered
    int velocity_dim = 0;
    /// Orthonormal basis of the recovered velocity subspace (3 x velocity_dim).
    Eigen::MatrixXd velocity_subspace;
    double residual = 0.0;  // sqrt of the weighted sum of squares
    int iterations = 0;
    bool converged = false;
    std::vector<Candidate> candidates;  // sorted by residual, first == estimate
    std::vector<std::string> warnings;
    std::vector<double> cost_history;
    std::string method;
};

struct HalfLine
{
    Vec3 origin;
    Vec3 direction;  // unit
};

struct HalfLineFix
{
    Vec3 position;
    double gap = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
};

struct DirectionPair
{
    Vec3 global;  // UE -> anchor in the global frame
    Vec3 local;   // the same direction measured in the UE frame
};

struct DopplerRow
{
    Vec3 direction;  // gradient of the path length w.r.t. UE position
    double hz = 0.0;
    double sigma = 1.0;
    double legs = 1.0;  // 2 for a monostatic loop
};

struct VelocityFix
{
    Vec3 velocity = Vec3::Zero();
    int dimension = 0;
    Eigen::MatrixXd subspace;  // 3 x dimension
};

/// Weighted least squares over the masked unknowns, starting at req.initial.
SolveResult refine(const SolveRequest& req);

SolveResult solve_tdoa_4bs(const SolveRequest& req);
SolveResult solve_siso_1ris_1bs(const SolveRequest& req);
SolveResult solve_siso_1ris_0bs(const SolveRequest& req);
/// Two or more AoD half-lines (from BS arrays or RISs), orientation from AoAs when present.
SolveResult solve_aod_halflines(const SolveRequest& req);
SolveResult solve_simo_aoa(const SolveRequest& req);

/// Picks the initializer matching the measurement mix.
SolveResult solve(const SolveRequest& req);

HalfLineFix solve_two_halflines(const HalfLine& h1, const HalfLine& h2);

Rot3 solve_rotation(const std::vector<DirectionPair>& pairs);
EulerZYX solve_orientation(const std::vector<DirectionPair>& pairs);

VelocityFix solve_velocity(const std::vector<DopplerRow>& rows, double lambda);
std::vector<DopplerRow> doppler_rows(const SolveRequest& req, const UeState& at);

void write_result_csv(std::ostream& os, const SolveResult& r);

// Near-field positioning from signal-level observations.

struct NearFieldObservation
{
    std::vector<PhaseProfile> profiles;
    Eigen::VectorXcd samples;  // one received sample per profile
    double noise_sigma = 0.0;
};

NearFieldObservation simulate_nearfield(const Vec3& source, const RisNode& ris, const Vec3& ue,
                                        const std::vector<PhaseProfile>& profiles, double lambda,
                                        cdouble gain = {1.0, 0.0}, double noise_sigma = 0.0,
                                        std::uint64_t seed = 0);

struct NearFieldSearch
{
    double min_range = 0.2;
    double max_range = 1000.0;
    int range_steps = 40;
    int angle_steps = 31;
    double max_angle = 1.3;  // rad, either side of boresight
};

struct NearFieldRequest
{
    Scenario scenario;
    std::size_t ris = 0;
    NearFieldObservation observation;
    NearFieldSearch search;
};

/// Source is the scenario's first BS; the direct BS-UE path plays no part.
SolveResult nf_position_from_curvature(const NearFieldRequest& req);

// Monte-Carlo check of the position estimator against the CRB.

struct CrbPoint
{
    double scale = 0.0;
    double rmse = 0.0;
    double crb = 0.0;  // sqrt of the position CRB trace
    int trials = 0;
    int failures = 0;
};

struct CrbStudy
{
    std::vector<CrbPoint> points;
    double slope = 0.0;  // of log rmse against log scale
};

CrbStudy crb_monte_carlo(const ScenarioFile& sf, const std::vector<double>& scales, int trials,
                         std::uint64_t seed, const NoiseSigmas& base = {});

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace risloc
