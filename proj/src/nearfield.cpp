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
#include <cstdio>
#include <random>
#include <string>

#include "risloc/constants.hpp"
#include "risloc/errors.hpp"
#include "risloc/lm.hpp"
#include "risloc/solvers.hpp"

namespace risloc {

NearFieldObservation simulate_nearfield(const Vec3& source, const RisNode& ris, const Vec3& ue,
                                        const std::vector<PhaseProfile>& profiles, double lambda, cdouble gain,
                                        double noise_sigma, std::uint64_t seed)
{
    NearFieldObservation out;
    out.profiles = profiles;
    out.noise_sigma = noise_sigma;
    out.samples.resize(static_cast<Eigen::Index>(profiles.size()));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, noise_sigma / std::sqrt(2.0));
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        cdouble y = gain * nf_received(source, ris, ue, profiles[k], lambda);
        if (noise_sigma > 0.0) y += cdouble(normal(rng), normal(rng));
        out.samples[static_cast<Eigen::Index>(k)] = y;
    }
    return out;
}

namespace {

// Noise-free response to every profile, with the source leg folded in once.
class NearFieldModel
{
  public:
    NearFieldModel(const Vec3& source, const RisNode& ris, const std::vector<PhaseProfile>& profiles, double lambda)
        : k_(kTwoPi / lambda), elements_(ris_element_positions(ris))
    {
        const auto n = static_cast<Eigen::Index>(elements_.size());
        source_leg_.resize(n);
        for (Eigen::Index e = 0; e < n; ++e) {
            const double d1 = (source - elements_[static_cast<std::size_t>(e)]).norm();
            source_leg_[e] = std::polar(1.0 / d1, -k_ * d1);
        }
        weights_.resize(static_cast<Eigen::Index>(profiles.size()), n);
        for (std::size_t p = 0; p < profiles.size(); ++p) {
            if (profiles[p].size() != n) throw Error("phase profile size mismatch");
            for (Eigen::Index e = 0; e < n; ++e)
                weights_(static_cast<Eigen::Index>(p), e) = std::polar(1.0, profiles[p][e]);
        }
    }

    Eigen::VectorXcd response(const Vec3& ue) const
    {
        Eigen::VectorXcd leg(source_leg_.size());
        for (Eigen::Index e = 0; e < leg.size(); ++e) {
            const double d2 = (ue - elements_[static_cast<std::size_t>(e)]).norm();
            if (!(d2 > 0.0)) throw DegenerateDirection("UE coincides with an RIS element");
            leg[e] = source_leg_[e] * std::polar(1.0 / d2, -k_ * d2);
        }
        return weights_ * leg;
    }

  private:
    double k_;
    std::vector<Vec3> elements_;
    Eigen::VectorXcd source_leg_;
    Eigen::MatrixXcd weights_;
};

// Residual after the best complex gain is fitted (variable projection).
Eigen::VectorXcd projected_residual(const Eigen::VectorXcd& y, const Eigen::VectorXcd& a)
{
    const double aa = a.squaredNorm();
    if (aa == 0.0) return y;
    return y - a * (a.dot(y) / aa);
}

}  // namespace

SolveResult nf_position_from_curvature(const NearFieldRequest& req)
{
    const Scenario& s = req.scenario;
    if (s.bss.empty()) throw Infeasible("near-field positioning needs a BS illuminating the RIS");
    if (req.ris >= s.riss.size()) throw Error("no RIS with index " + std::to_string(req.ris));
    const NearFieldObservation& obs = req.observation;
    if (obs.profiles.size() < 2) throw Infeasible("near-field positioning needs at least two phase profiles");
    if (static_cast<std::size_t>(obs.samples.size()) != obs.profiles.size())
        throw Error("one sample per phase profile expected");

    const RisNode& ris = s.riss[req.ris];
    const Vec3 source = s.bss.front().position;
    const NearFieldModel model(source, ris, obs.profiles, s.lambda());
    const Eigen::VectorXcd& y = obs.samples;
    const double sigma = obs.noise_sigma > 0.0 ? obs.noise_sigma : 1.0;

    // Coarse maximum-likelihood search over RIS-frame angles and log range.
    const NearFieldSearch& g = req.search;
    const auto position_at = [&](double az, double el, double range) {
        return Vec3(ris.center + range * ris_aod_direction(ris, AzEl{az, el}));
    };
    double best = 1e300;
    Vec3 start = position_at(0.0, 0.0, g.min_range);
    double start_range = g.min_range;
    for (int ir = 0; ir < g.range_steps; ++ir) {
        const double range =
            g.min_range * std::pow(g.max_range / g.min_range, g.range_steps > 1 ? double(ir) / (g.range_steps - 1) : 0.0);
        for (int ia = 0; ia < g.angle_steps; ++ia)
            for (int ie = 0; ie < g.angle_steps; ++ie) {
                const double step = g.angle_steps > 1 ? 2.0 * g.max_angle / (g.angle_steps - 1) : 0.0;
                const Vec3 p = position_at(-g.max_angle + ia * step, -g.max_angle + ie * step, range);
                double c;
                try {
                    c = projected_residual(y, model.response(p)).squaredNorm();
                } catch (const Error&) {
                    continue;
                }
                if (c < best) best = c, start = p, start_range = range;
            }
    }

    const ResidualFn f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd out(2 * y.size());
        try {
            const Eigen::VectorXcd r = projected_residual(y, model.response(x));
            out << r.real(), r.imag();
            return out / sigma;
        } catch (const Error&) {
            return Eigen::VectorXd::Constant(out.size(), 1e10);
        }
    };
    const LmResult lm = levenberg_marquardt(f, start);

    SolveResult out;
    out.method = "nearfield-curvature";
    out.estimate.position = lm.x;
    out.estimated = UnknownMask{};
    out.residual = std::sqrt(2.0 * lm.cost);
    out.iterations = lm.iterations;
    out.converged = lm.converged;
    out.cost_history = lm.cost_history;
    out.candidates.push_back({out.estimate, out.residual});
    if (!out.converged) out.warnings.push_back("refine did not converge");

    const NearFieldRank rank = nearfield_position_rank(
        nearfield_jacobian(source, ris, out.estimate.position, obs.profiles, s.lambda(), sigma));
    if (rank.position_rank < 3) {
        out.estimated.position = false;
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "non-identifiable: position FIM rank %d < 3 (eigenvalue ratio %.3g); the UE is not in the "
                      "RIS near field",
                      rank.position_rank, rank.eigen_ratio);
        out.warnings.push_back(buf);
    }
    if (start_range == g.max_range) out.warnings.push_back("likelihood maximum at the edge of the range search");
    return out;
}

}  // namespace risloc
