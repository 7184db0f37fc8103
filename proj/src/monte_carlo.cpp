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

#include "risloc/errors.hpp"
#include "risloc/solvers.hpp"

namespace risloc {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    // splitmix64 over the three words
    std::uint64_t z = seed;
    for (std::uint64_t w : {a, b}) {
        z += 0x9e3779b97f4a7c15ULL + w;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
    }
    return z;
}

CrbStudy crb_monte_carlo(const ScenarioFile& sf, const std::vector<double>& scales, int trials, std::uint64_t seed,
                         const NoiseSigmas& base)
{
    if (!sf.ue) throw Infeasible("Monte-Carlo study needs the true UE state in the scenario file");
    if (trials < 1) throw Error("at least one trial is needed");
    const Scenario& s = sf.scenario;
    const UeState& truth = *sf.ue;

    CrbStudy out;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        const NoiseSigmas sig = base.scaled(scales[i]);
        CrbPoint pt;
        pt.scale = scales[i];
        pt.trials = trials;
        pt.crb = ident_report(fim(s, truth, sig)).position_crb();

        double sum = 0.0;
        int ok = 0;
        for (int t = 0; t < trials; ++t) {
            SolveRequest req;
            req.scenario = s;
            req.measurements = generate(s, truth, sig, trial_seed(seed, i, static_cast<std::uint64_t>(t)));
            req.unknowns = scenario_mask(s);
            req.fallback_sigmas = sig;
            try {
                const SolveResult r = solve(req);
                sum += (r.estimate.position - truth.position).squaredNorm();
                ++ok;
            } catch (const Error&) {
                ++pt.failures;
            }
        }
        pt.rmse = ok ? std::sqrt(sum / ok) : std::nan("");
        out.points.push_back(pt);
    }

    // Least-squares slope of log rmse against log scale.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& p : out.points) {
        if (!(p.rmse > 0.0) || !(p.scale > 0.0)) continue;
        const double x = std::log(p.scale), y = std::log(p.rmse);
        sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
    }
    out.slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : std::nan("");
    return out;
}

}  // namespace risloc
