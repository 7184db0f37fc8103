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

#include "risloc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "risloc/measurements.hpp"

namespace risloc {

namespace {

void check_profile(const RisNode& ris, const PhaseProfile& profile)
{
    if (static_cast<std::size_t>(profile.size()) != ris.num_elements())
        throw Error("phase profile has " + std::to_string(profile.size()) + " entries, RIS '" + ris.id + "' has " +
                    std::to_string(ris.num_elements()) + " elements");
}

const BsNode& source_bs(const Scenario& s)
{
    if (s.bss.empty()) throw Infeasible("signal model needs a BS to illuminate the RIS");
    return s.bss.front();
}

const RisNode& ris_at(const Scenario& s, std::size_t i)
{
    if (i >= s.riss.size()) throw Error("no RIS with index " + std::to_string(i));
    return s.riss[i];
}

}  // namespace

PhaseProfile phase_profile_of(const RisNode& r)
{
    PhaseProfile p(static_cast<Eigen::Index>(r.num_elements()));
    for (std::size_t i = 0; i < r.num_elements(); ++i)
        p[static_cast<Eigen::Index>(i)] = i < r.phase_profile.size() ? r.phase_profile[i] : 0.0;
    return p;
}

PhaseProfile wrap_profile(PhaseProfile p)
{
    for (auto& v : p) v = wrap_positive(v);
    return p;
}

cdouble nf_received(const Vec3& source, const RisNode& ris, const Vec3& ue, const PhaseProfile& profile,
                    double lambda)
{
    check_profile(ris, profile);
    const double k = kTwoPi / lambda;
    const auto elements = ris_element_positions(ris);
    cdouble sum = 0.0;
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const double d1 = (source - elements[e]).norm();
        const double d2 = (elements[e] - ue).norm();
        if (!(d1 > 0.0) || !(d2 > 0.0)) throw DegenerateDirection("point coincides with RIS element");
        sum += std::polar(1.0 / (d1 * d2), -k * (d1 + d2) + profile[static_cast<Eigen::Index>(e)]);
    }
    return sum;
}

cdouble ff_received(const Vec3& source, const RisNode& ris, const Vec3& ue, const PhaseProfile& profile,
                    double lambda)
{
    check_profile(ris, profile);
    const double k = kTwoPi / lambda;
    const double d1 = (source - ris.center).norm();
    const double d2 = (ue - ris.center).norm();
    const Vec3 u_in = unit_direction(ris.center, source);
    const Vec3 u_out = unit_direction(ris.center, ue);
    const auto elements = ris_element_positions(ris);
    cdouble af = 0.0;
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const Vec3 offset = elements[e] - ris.center;
        af += std::polar(1.0, k * offset.dot(u_in + u_out) + profile[static_cast<Eigen::Index>(e)]);
    }
    return std::polar(1.0 / (d1 * d2), -k * (d1 + d2)) * af;
}

cdouble nf_received(const Scenario& s, std::size_t ris, const Vec3& ue, const PhaseProfile& profile)
{
    return nf_received(source_bs(s).position, ris_at(s, ris), ue, profile, s.lambda());
}

cdouble ff_received(const Scenario& s, std::size_t ris, const Vec3& ue, const PhaseProfile& profile)
{
    return ff_received(source_bs(s).position, ris_at(s, ris), ue, profile, s.lambda());
}

PhaseProfile steering_profile(const RisNode& ris, const AzEl& target, const Vec3& incident_from, double lambda)
{
    const double k = kTwoPi / lambda;
    const Vec3 u_in = unit_direction(ris.center, incident_from);
    const Vec3 u_out = ris_aod_direction(ris, target);
    const auto elements = ris_element_positions(ris);
    PhaseProfile p(static_cast<Eigen::Index>(elements.size()));
    for (std::size_t e = 0; e < elements.size(); ++e)
        p[static_cast<Eigen::Index>(e)] = wrap_positive(-k * (elements[e] - ris.center).dot(u_in + u_out));
    return p;
}

Codebook make_codebook(const RisNode& ris, int n_beams, double az_span, double lambda,
                       std::optional<Vec3> incident_from)
{
    if (n_beams < 1) throw Error("codebook needs at least one beam");
    const Vec3 source = incident_from.value_or(ris_aod_direction(ris, AzEl{}) + ris.center);
    Codebook cb;
    for (int b = 0; b < n_beams; ++b) {
        AzEl label;
        label.azimuth = n_beams == 1 ? 0.0 : -0.5 * az_span + az_span * b / (n_beams - 1);
        cb.labels.push_back(label);
        cb.profiles.push_back(steering_profile(ris, label, source, lambda));
    }
    return cb;
}

int GridSpec::cols() const { return static_cast<int>(std::floor((x1 - x0) / step + 1e-9)); }
int GridSpec::rows() const { return static_cast<int>(std::floor((y1 - y0) / step + 1e-9)); }

Vec3 GridSpec::cell_center(int row, int col) const
{
    return {x0 + (col + 0.5) * step, y0 + (row + 0.5) * step, z};
}

PowerMap beam_sweep_estimate(const Scenario& s, const UeState& truth, const std::vector<Codebook>& codebooks,
                             const GridSpec& grid, double noise_sigma, std::uint64_t seed)
{
    if (!(grid.step > 0.0) || grid.cols() < 1 || grid.rows() < 1)
        throw Error("degenerate grid: need x1 > x0, y1 > y0 and step > 0 with at least one cell");
    if (s.riss.size() < 2) throw Infeasible("beam sweep needs two RISs");
    if (codebooks.size() != s.riss.size()) throw Error("one codebook per RIS is required");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double component_sigma = noise_sigma / std::sqrt(2.0);

    PowerMap map;
    map.grid = grid;
    for (std::size_t r = 0; r < s.riss.size(); ++r) {
        const Codebook& cb = codebooks[r];
        if (cb.size() == 0) throw Error("empty codebook");
        Eigen::VectorXd power(static_cast<Eigen::Index>(cb.size()));
        for (std::size_t b = 0; b < cb.size(); ++b) {
            cdouble y = nf_received(s, r, truth.position, cb.profiles[b]);
            if (noise_sigma > 0.0) y += cdouble(component_sigma * normal(rng), component_sigma * normal(rng));
            power[static_cast<Eigen::Index>(b)] = std::norm(y);
        }
        Eigen::Index best = 0;
        const double peak = power.maxCoeff(&best);
        if (peak > 0.0) power /= peak;
        map.beam_power.push_back(power);
        map.best_beam.push_back(static_cast<int>(best));
    }

    auto nearest_beam = [](const Codebook& cb, double az) {
        const auto it = std::lower_bound(cb.labels.begin(), cb.labels.end(), az,
                                         [](const AzEl& l, double a) { return l.azimuth < a; });
        if (it == cb.labels.begin()) return std::size_t{0};
        if (it == cb.labels.end()) return cb.labels.size() - 1;
        const auto hi = static_cast<std::size_t>(it - cb.labels.begin());
        return (az - cb.labels[hi - 1].azimuth) <= (cb.labels[hi].azimuth - az) ? hi - 1 : hi;
    };

    map.score = Eigen::MatrixXd::Zero(grid.rows(), grid.cols());
    double best_score = -1.0;
    for (int row = 0; row < grid.rows(); ++row) {
        for (int col = 0; col < grid.cols(); ++col) {
            UeState cell;
            cell.position = grid.cell_center(row, col);
            double score = 0.0;
            for (std::size_t r = 0; r < s.riss.size(); ++r) {
                if ((cell.position - s.riss[r].center).norm() == 0.0) continue;
                const double az = aod(s.riss[r], cell).azimuth;
                score += map.beam_power[r][static_cast<Eigen::Index>(nearest_beam(codebooks[r], az))];
            }
            map.score(row, col) = score;
            if (score > best_score) {
                best_score = score;
                map.best_row = row;
                map.best_col = col;
            }
        }
    }
    map.estimate = grid.cell_center(map.best_row, map.best_col);
    return map;
}

double sweep_peak_amplitude(const Scenario& s, const UeState& truth, const std::vector<Codebook>& codebooks)
{
    double peak = 0.0;
    for (std::size_t r = 0; r < codebooks.size() && r < s.riss.size(); ++r)
        for (const auto& p : codebooks[r].profiles) peak = std::max(peak, std::abs(nf_received(s, r, truth.position, p)));
    return peak;
}

void write_power_map_csv(std::ostream& os, const PowerMap& m)
{
    os << "x,y,score\n";
    char buf[96];
    for (int row = 0; row < m.grid.rows(); ++row) {
        for (int col = 0; col < m.grid.cols(); ++col) {
            const Vec3 c = m.grid.cell_center(row, col);
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", c.x(), c.y(), m.score(row, col));
            os << buf;
        }
    }
}

void write_codebook_csv(std::ostream& os, const Codebook& c)
{
    os << "beam,az,el";
    const Eigen::Index n = c.profiles.empty() ? 0 : c.profiles.front().size();
    for (Eigen::Index e = 0; e < n; ++e) os << ",phase_" << e;
    os << '\n';
    char buf[32];
    for (std::size_t b = 0; b < c.size(); ++b) {
        os << b;
        std::snprintf(buf, sizeof buf, ",%.17g", c.labels[b].azimuth);
        os << buf;
        std::snprintf(buf, sizeof buf, ",%.17g", c.labels[b].elevation);
        os << buf;
        for (Eigen::Index e = 0; e < n; ++e) {
            std::snprintf(buf, sizeof buf, ",%.17g", c.profiles[b][e]);
            os << buf;
        }
        os << '\n';
    }
}

double fraunhofer_distance(const RisNode& ris, double lambda)
{
    const double d = ris.spacing * std::hypot(static_cast<double>(ris.nx), static_cast<double>(ris.ny));
    return 2.0 * d * d / lambda;
}

}  // namespace risloc
