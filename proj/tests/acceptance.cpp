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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "risloc/constants.hpp"
#include "risloc/identifiability.hpp"
#include "risloc/signal.hpp"
#include "risloc/solvers.hpp"

using namespace risloc;

namespace {

const char* const kRows[10] = {
    "row01_siso_0ris_4bs.json", "row02_siso_1ris_1bs.json", "row03_siso_2ris_1bs.json",
    "row04_siso_1ris_0bs.json", "row05_miso_0ris_2bs.json", "row06_miso_1ris_1bs.json",
    "row07_simo_0ris_3bs.json", "row08_simo_1ris_1bs.json", "row09_mimo_0ris_2bs.json",
    "row10_mimo_1ris_1bs.json",
};

std::string gallery(const std::string& f) { return std::string(RISLOC_GALLERY_DIR) + "/" + f; }

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const char* name, bool ok, double secs, const std::string& detail)
{
    std::printf("%s criterion %d: %s (%s; %.1f s)\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(), secs);
    std::fflush(stdout);
    failures += !ok;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

void table_reproduction()
{
    const auto t0 = Clock::now();
    std::vector<ScenarioFile> files;
    for (const char* f : kRows) files.push_back(load(gallery(f)));
    const auto rows = reproduce_table(files);
    int match = 0;
    for (const auto& r : rows) {
        match += r.match;
        if (!r.match) std::printf("  mismatch: %s\n", r.name.c_str());
    }
    const double secs = seconds_since(t0);
    report(1, "Table-1 reproduction", rows.size() == 10 && match == 10 && secs < 30, secs,
           fmt("%.0f/%.0f rows match", match, static_cast<double>(rows.size())));
}

double rotation_angle(const Rot3& a, const Rot3& b)
{
    const double c = std::clamp(((a.transpose() * b).trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c);
}

void noiseless_recovery()
{
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int row = 1; row <= 10; ++row) {
        const ScenarioFile f = load(gallery(kRows[row - 1]));
        const UeState& u = *f.ue;
        SolveRequest req;
        req.scenario = f.scenario;
        req.measurements = generate(f.scenario, u, NoiseSigmas::zero(), 1);
        req.unknowns = scenario_mask(f.scenario);
        const SolveResult r = solve(req);
        double err = (r.estimate.position - u.position).norm();
        if (r.estimated.clock) err = std::max(err, kSpeedOfLight * std::abs(r.estimate.clock_bias - u.clock_bias));
        if (r.velocity_dim > 0)
            err = std::max(err, (r.velocity_subspace.transpose() * (r.estimate.velocity - u.velocity)).norm());
        // orientation error is reported only when the angles make it identifiable
        if (r.estimated.orientation)
            err = std::max(err, rotation_angle(rot_zyx(r.estimate.orientation), rot_zyx(u.orientation)));
        std::printf("  row %2d %-22s max error %.2e\n", row, r.method.c_str(), err);
        worst = std::max(worst, err);
    }
    const double secs = seconds_since(t0);
    report(2, "noiseless recovery", worst < 1e-6 && secs < 60, secs, fmt("worst component error %.2e", worst));
}

void beam_sweep_replica()
{
    const auto t0 = Clock::now();
    const ScenarioFile f = load(gallery("experiment_replica.json"));
    const Scenario& s = f.scenario;
    std::vector<Codebook> books;
    for (const auto& r : s.riss) books.push_back(make_codebook(r, 63, 120.0 * kPi / 180.0, s.lambda(), s.bss[0].position));
    GridSpec grid;
    Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
    for (const auto& b : s.bss) lo = lo.cwiseMin(b.position), hi = hi.cwiseMax(b.position);
    for (const auto& r : s.riss) lo = lo.cwiseMin(r.center), hi = hi.cwiseMax(r.center);
    grid.x0 = lo.x() - 0.2, grid.y0 = lo.y() - 0.2, grid.x1 = hi.x() + 0.2, grid.y1 = hi.y() + 0.2;
    grid.step = 0.01;

    const int trials = 100;
    const double snr_db = 20.0;
    int hits = 0;
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
        // each trial moves the UE inside a 30 cm square around the nominal spot
        std::mt19937_64 rng(trial_seed(7, 3, static_cast<std::uint64_t>(k)));
        std::uniform_real_distribution<double> jitter(-0.15, 0.15);
        UeState u = *f.ue;
        u.position.x() += jitter(rng);
        u.position.y() += jitter(rng);
        grid.z = u.position.z();
        const double sigma = sweep_peak_amplitude(s, u, books) * std::pow(10.0, -snr_db / 20.0);
        const PowerMap m = beam_sweep_estimate(s, u, books, grid, sigma, trial_seed(7, 4, static_cast<std::uint64_t>(k)));
        const double e = (m.estimate - u.position).norm();
        hits += e < 0.10;
        worst = std::max(worst, e);
    }
    const double secs = seconds_since(t0);
    report(3, "beam-sweep replica", hits >= 95 && secs < 120, secs,
           fmt("%.0f/100 trials under 10 cm at %.0f dB, worst %.1f cm", hits, snr_db, 100 * worst));
}

void crb_consistency()
{
    const auto t0 = Clock::now();
    const std::vector<double> scales{0.01, 0.03, 0.1, 0.3};
    bool ok = true;
    std::string detail;
    for (int row : {3, 1}) {
        const ScenarioFile f = load(gallery(kRows[row - 1]));
        const CrbStudy st = crb_monte_carlo(f, scales, 500, 11);
        double lo = 1e300, hi = 0.0;
        int fails = 0;
        for (const auto& p : st.points) {
            const double ratio = p.rmse / p.crb;
            lo = std::min(lo, ratio), hi = std::max(hi, ratio);
            fails += p.failures;
            std::printf("  row %d scale %-5g rmse %.3e m crb %.3e m ratio %.3f failures %d\n", row, p.scale, p.rmse,
                        p.crb, ratio, p.failures);
        }
        const bool row_ok = lo >= 0.5 && hi <= 2.0 && std::abs(st.slope - 1.0) <= 0.15 && fails == 0;
        ok = ok && row_ok;
        if (!detail.empty()) detail += "; ";
        detail += fmt("row %.0f ratio %.2f..%.2f slope %.3f", row, lo, hi, st.slope);
    }
    report(4, "CRB consistency", ok, seconds_since(t0), detail);
}

void near_far_transition()
{
    const auto t0 = Clock::now();
    Scenario s;
    s.name = "nearfield";
    s.carrier_hz = 28e9;
    s.signaling = Signaling::narrowband();
    s.measurement_mix = {MeasurementKind::AoD};
    BsNode b;
    b.id = "bs1";
    b.position = {3, -2, 1.5};
    s.bss.push_back(b);
    s.los_blocked.insert("bs1");
    RisNode r;
    r.id = "ris1";
    r.center = {0, 0, 1.5};
    r.orientation = {0.0, 0.0, -kPi / 2};
    r.nx = r.ny = 8;
    r.spacing = half_wavelength(s.carrier_hz);
    r.phase_profile.assign(r.num_elements(), 0.0);
    s.riss.push_back(r);

    const std::vector<double> ranges{0.3, 0.685, 2.0, 500.0, 1000.0};
    const NearFieldSweep sw = nearfield_ident_sweep(s, 0, ris_aod_direction(r, {0.35, 0.17}), ranges);
    bool ok = sw.points.size() == ranges.size();
    std::string ladder;
    for (const auto& p : sw.points) {
        const int want = p.range < 10.0 ? 3 : 2;
        ok = ok && p.position_rank == want;
        ladder += fmt("%g m:%.0f ", p.range, p.position_rank);
    }
    ladder += fmt("d_F %.3f m", sw.fraunhofer);
    report(5, "near/far-field transition", ok, seconds_since(t0), ladder);
}

void property_suites()
{
    const auto t0 = Clock::now();
    struct Suite
    {
        const char* name;
        const char* binary;
        const char* filter;
    };
    const Suite suites[] = {
        {"rotation group laws", TEST_GEOMETRY, "Rotation.*:Direction.AngleBetweenIsRotationInvariant"},
        {"clock-bias laws", TEST_MEASUREMENTS, "Delay.ClockBiasLaws"},
        {"AoD orientation invariance", TEST_MEASUREMENTS, "Angles.AodIgnoresUeOrientation*"},
        {"AoA yaw equivariance", TEST_MEASUREMENTS, "Angles.AoaYawEquivariance"},
        {"inter-AoA angle invariance", TEST_MEASUREMENTS, "Angles.InterAoaAngleIsRotationInvariant"},
        {"Doppler linearity", TEST_MEASUREMENTS, "Doppler.*"},
        {"FIM symmetry and PSD", TEST_IDENTIFIABILITY, "Fim.SymmetricPsdOverGallery"},
        {"finite-difference Jacobians", TEST_MEASUREMENTS, "Gradient.*"},
        {"finite-difference Jacobians (FIM)", TEST_IDENTIFIABILITY, "Jacobian.*:NearField.AnalyticJacobian*"},
        {"half-line symmetry", TEST_SOLVERS, "HalfLines.SwapSymmetric"},
        {"velocity subspace dimensions", TEST_IDENTIFIABILITY, "Rank.VelocityDimensionsFollowTableRows"},
        {"velocity solver dimensions", TEST_SOLVERS, "Velocity.*"},
    };
    int bad = 0;
    for (const auto& s : suites) {
        const std::string cmd = std::string(s.binary) + " --gtest_filter='" + s.filter + "' > /dev/null 2>&1";
        const bool ok = std::system(cmd.c_str()) == 0;
        std::printf("  %s %s\n", ok ? "ok  " : "FAIL", s.name);
        bad += !ok;
    }
    const int n = static_cast<int>(std::size(suites));
    report(6, "property suites", bad == 0, seconds_since(t0), fmt("%.0f/%.0f suites pass", n - bad, n));
}

}  // namespace

int main()
{
    table_reproduction();
    noiseless_recovery();
    beam_sweep_replica();
    crb_consistency();
    near_far_transition();
    property_suites();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
