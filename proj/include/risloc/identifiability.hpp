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

#include "risloc/measurements.hpp"
#include "risloc/signal.hpp"

namespace risloc {

enum class Block { Position, Clock, Velocity, Orientation };
std::string_view to_string(Block b);

/// Which UE state components are unknown. Order in stacked vectors:
/// position(3), clock(1), velocity(3), orientation(3).
struct UnknownMask
{
    bool position = true;
    bool clock = false;
    bool velocity = false;
    bool orientation = false;

    int dim() const { return 3 * position + clock + 3 * velocity + 3 * orientation; }
    bool has(Block b) const;
    bool operator==(const UnknownMask&) const = default;
};

/*!
 * Unknowns a scenario can speak to: clock only with one-way delays (ToA),
 * velocity only with Doppler, orientation only with AoA at a UE array.
 */
UnknownMask scenario_mask(const Scenario& s);

struct BlockIndex
{
    Block block;
    int offset;
    int size;
};
std::vector<BlockIndex> block_layout(const UnknownMask& m);

/// Stacks the masked components of u; clock in seconds.
Eigen::VectorXd pack(const UeState& u, const UnknownMask& m);
/// Writes x back into a copy of `base`.
UeState unpack(const Eigen::VectorXd& x, const UnknownMask& m, UeState base);

/*!
 * Jacobian of the stacked planned measurements with respect to the masked
 * unknowns by central differences (relative step 1e-6, absolute floor 1e-9).
 * Azimuth differences are wrapped. Throws Error naming the measurement when
 * an entry is not finite.
 */
Eigen::MatrixXd measurement_jacobian(const std::vector<Measurement>& plan, const Scenario& s, const UeState& u,
                                     const UnknownMask& m);

struct Fim
{
    Eigen::MatrixXd matrix;
    UnknownMask mask;
    std::vector<BlockIndex> blocks;
    UeState state;  // evaluation point
};

/// J^T Sigma^-1 J over the scenario's planned measurements.
Fim fim(const Scenario& s, const UeState& u, const NoiseSigmas& sigmas);
Fim fim(const Scenario& s, const UeState& u, const NoiseSigmas& sigmas, const UnknownMask& mask);

enum class Verdict { Identifiable, Ambiguous, NonIdentifiable };
std::string_view to_string(Verdict v);

struct BlockReport
{
    Block block;
    int size;
    int identifiable_dim;
};

struct IdentReport
{
    std::vector<BlockReport> blocks;
    int total_rank = 0;
    int masked_dim = 0;
    Verdict verdict = Verdict::NonIdentifiable;
    Eigen::VectorXd crb_diag;                  // pseudo-inverse diagonal, original units
    Eigen::VectorXd singular_values;           // of the Jacobi-scaled FIM
    bool chart_singularity = false;            // orientation near gimbal lock

    /// Identifiable dimension of a block; 0 when the block is not in the mask.
    int dim(Block b) const;
    /// sqrt of the summed position CRB entries.
    double position_crb() const;
};

inline constexpr double kRankTolerance = 1e-8;
/// Eigenvalues below this fraction of a block's own information are roundoff.
inline constexpr double kRoundoffFloor = 1e-12;

/*!
 * Rank of a symmetric PSD matrix after Jacobi scaling (unit diagonal where
 * nonzero), counting singular values above `rel_tol` times the largest.
 */
int scaled_rank(const Eigen::MatrixXd& f, double rel_tol = kRankTolerance);

/*!
 * Identifiable dimension of each block: the rank of its equivalent FIM
 * (Schur complement against all other unknowns) on the Jacobi-scaled matrix.
 * An eigenvalue counts when it exceeds rel_tol times the largest EFIM
 * eigenvalue and kRoundoffFloor times the block's own diagonal.
 */
std::vector<int> block_dims(const Eigen::MatrixXd& f, const std::vector<BlockIndex>& blocks,
                            double rel_tol = kRankTolerance);

IdentReport ident_report(const Fim& f);
/// Marks an identifiable report ambiguous when a solver found several candidates.
IdentReport with_candidates(IdentReport r, std::size_t n_candidates);

void write_report_csv(std::ostream& os, const IdentReport& r);

// ---------------------------------------------------------------------------
// Table reproduction

struct Table1Row
{
    int row;
    std::string link;          // SISO, MISO, SIMO, MIMO
    std::string scenario;      // "1 RIS, 1 BS"
    std::string signalling;    // WB / NB
    std::string measurements;  // as printed
    int position;
    int clock;
    int velocity;
    int orientation;
    std::string also;  // "Positioning is possible also" column
};

/// The ten downlink rows of the reference identifiability table.
const std::vector<Table1Row>& table1();

/// "3D pos, clock, 2D vel" style rendering.
std::string describe_state(int position, int clock, int velocity, int orientation);

struct TableComparison
{
    std::string name;
    int row = 0;
    int position = 0;
    int clock = 0;
    int velocity = 0;
    int orientation = 0;
    bool match = false;
    IdentReport report;
};

/// Evaluates every gallery scenario at its stored UE state and compares with table1().
std::vector<TableComparison> reproduce_table(const std::vector<ScenarioFile>& gallery,
                                             const NoiseSigmas& sigmas = {});
std::string format_table(const std::vector<TableComparison>& rows);
void write_table_csv(std::ostream& os, const std::vector<TableComparison>& rows);

// ---------------------------------------------------------------------------
// Near-field identifiability

/// n profiles with independent uniform phases (seeded).
std::vector<PhaseProfile> random_profiles(const RisNode& ris, int n, std::uint64_t seed);

/*!
 * Whitened Jacobian (2K x 5, real parts stacked over imaginary parts) of
 * [position(3), Re g, Im g] for observations
 * y_k = g * nf_received(source, ris, ue, profile_k) + circular noise with
 * total variance sigma^2, evaluated at g = 1. Position derivatives are
 * analytic.
 */
Eigen::MatrixXd nearfield_jacobian(const Vec3& source, const RisNode& ris, const Vec3& ue,
                                   const std::vector<PhaseProfile>& profiles, double lambda, double sigma);
/// J^T J of nearfield_jacobian.
Eigen::MatrixXd nearfield_fim(const Vec3& source, const RisNode& ris, const Vec3& ue,
                              const std::vector<PhaseProfile>& profiles, double lambda, double sigma);

struct NearFieldRank
{
    int position_rank = 0;
    double eigen_ratio = 0.0;  // smallest / largest eigenvalue of the scaled position EFIM
};

/// Position rank with the complex gain eliminated, from a nearfield_jacobian.
NearFieldRank nearfield_position_rank(const Eigen::MatrixXd& jacobian);

struct NearFieldPoint
{
    double range = 0.0;
    int position_rank = 0;
    double eigen_ratio = 0.0;  // smallest / largest eigenvalue of the scaled position EFIM
};

struct NearFieldSweep
{
    std::vector<NearFieldPoint> points;
    std::optional<double> transition_range;  // first ladder range with position rank < 3
    double fraunhofer = 0.0;
};

struct NearFieldOptions
{
    int n_profiles = 16;
    std::uint64_t seed = 1;
    double noise_sigma = 1.0;
};

/// Position rank along `direction` (global unit vector from the RIS center) over a range ladder.
NearFieldSweep nearfield_ident_sweep(const Scenario& s, std::size_t ris, const Vec3& direction,
                                     const std::vector<double>& ranges, const NearFieldOptions& opt = {});

}  // namespace risloc
