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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "risloc/constants.hpp"
#include "risloc/errors.hpp"
#include "risloc/measurements.hpp"
#include "support.hpp"

using namespace risloc;
using namespace risloc::testing;

namespace {

Scenario mixed_scene()
{
    Scenario s = bs_scene({{0, 0, 5}, {20, 0, 4}, {0, 20, 6}}, {MeasurementKind::ToA, MeasurementKind::TDoA,
                                                             MeasurementKind::RTT, MeasurementKind::AoD,
                                                             MeasurementKind::AoA, MeasurementKind::Doppler});
    s.bss[0].antenna = Antenna::array(4, 4, half_wavelength(s.carrier_hz));
    s.bss[0].orientation = {0.6, 0.1, 0.0};
    s.riss.push_back(ris_facing_y("ris1", {10, -2, 3}, s.carrier_hz));
    s.ue_antenna = Antenna::array(2, 2, half_wavelength(s.carrier_hz));
    return s;
}

UeState some_ue(std::mt19937_64& rng)
{
    UeState u;
    u.position = random_vec(rng, 3, 15);
    u.position.z() = 1.5;
    u.velocity = random_vec(rng, -3, 3);
    u.clock_bias = 40e-9;
    u.orientation = random_euler(rng, 1.0);
    return u;
}

}  // namespace

TEST(Delay, ClockBiasLaws)
{
    const Scenario s = mixed_scene();
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        UeState u = some_ue(rng);
        const Path a = Path::direct(1), b = Path::reflected(2, 0);
        const double toa0 = toa(a, s, u), tdoa0 = tdoa(a, b, s, u), rtt0 = rtt(a, s, u);
        EXPECT_NEAR(toa0, path_length(a, s, u) / kSpeedOfLight + u.clock_bias, 1e-20);
        EXPECT_NEAR(rtt0, 2.0 * path_length(a, s, u) / kSpeedOfLight, 1e-20);
        const double shift = 1e-7;
        u.clock_bias += shift;
        EXPECT_NEAR(toa(a, s, u) - toa0, shift, 1e-20);
        EXPECT_EQ(tdoa(a, b, s, u), tdoa0);
        EXPECT_EQ(rtt(a, s, u), rtt0);
    }
}

TEST(Delay, ReflectedLengthIsTwoLegs)
{
    const Scenario s = mixed_scene();
    UeState u;
    u.position = {4, 6, 1};
    const double expect = (s.riss[0].center - s.bss[1].position).norm() + (u.position - s.riss[0].center).norm();
    EXPECT_NEAR(path_length(Path::reflected(1, 0), s, u), expect, 1e-12);
    EXPECT_NEAR(path_length(Path::monostatic(0), s, u), (u.position - s.riss[0].center).norm(), 1e-12);
}

TEST(Delay, NarrowbandRefusesDelays)
{
    Scenario s = mixed_scene();
    s.signaling = Signaling::narrowband();
    UeState u;
    u.position = {5, 5, 1};
    try {
        toa(Path::direct(0), s, u);
        FAIL();
    } catch (const Infeasible& e) {
        EXPECT_NE(std::string(e.what()).find(kRuleWideband), std::string::npos);
    }
    EXPECT_THROW(tdoa(Path::direct(0), Path::direct(1), s, u), Infeasible);
}

TEST(Angles, AodIgnoresUeOrientationAndMatchesFrameOracle)
{
    const Scenario s = mixed_scene();
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        UeState u = some_ue(rng);
        const AzEl a = aod(s.bss[0], u);
        const AzEl ar = aod(s.riss[0], u);
        const Vec3 local = rot_zyx(s.bss[0].orientation).transpose() * (u.position - s.bss[0].position);
        EXPECT_NEAR(a.azimuth, std::atan2(local.y(), local.x()), 1e-12);
        EXPECT_NEAR(a.elevation, std::asin(local.z() / local.norm()), 1e-12);
        u.orientation = random_euler(rng);
        u.clock_bias = -1e-6;
        EXPECT_EQ(aod(s.bss[0], u), a);
        EXPECT_EQ(aod(s.riss[0], u), ar);
        EXPECT_LT((bs_aod_direction(s.bss[0], a) - (u.position - s.bss[0].position).normalized()).norm(), 1e-12);
        EXPECT_LT((ris_aod_direction(s.riss[0], aod(s.riss[0], u)) - (u.position - s.riss[0].center).normalized())
                      .norm(),
                  1e-12);
    }
}

TEST(Angles, RisBoresightIsZero)
{
    const Scenario s = mixed_scene();
    UeState u;
    u.position = s.riss[0].center + Vec3(0, 7, 0);
    const AzEl a = aod(s.riss[0], u);
    EXPECT_NEAR(a.azimuth, 0.0, 1e-15);
    EXPECT_NEAR(a.elevation, 0.0, 1e-15);
}

TEST(Angles, AoaYawEquivariance)
{
    const Scenario s = mixed_scene();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> yaw(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
        UeState u = some_ue(rng);
        u.orientation = {};
        const AzEl a0 = aoa(Path::direct(1), s, u);
        const double d = yaw(rng);
        u.orientation.alpha = d;
        const AzEl a1 = aoa(Path::direct(1), s, u);
        EXPECT_NEAR(wrap_angle(a1.azimuth - (a0.azimuth - d)), 0.0, 1e-12);
        EXPECT_NEAR(a1.elevation, a0.elevation, 1e-12);
    }
}

TEST(Angles, InterAoaAngleIsRotationInvariant)
{
    const Scenario s = mixed_scene();
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        UeState u = some_ue(rng);
        const Vec3 g1 = s.bss[0].position - u.position, g2 = s.riss[0].center - u.position;
        const double truth = angle_between(g1, g2);
        for (int k = 0; k < 3; ++k) {
            u.orientation = random_euler(rng);
            const Vec3 l1 = azel_to_direction(aoa(Path::direct(0), s, u));
            const Vec3 l2 = azel_to_direction(aoa(Path::reflected(0, 0), s, u));
            EXPECT_NEAR(angle_between(l1, l2), truth, 1e-12);
        }
    }
}

TEST(Doppler, LinearInVelocityAndSigned)
{
    const Scenario s = mixed_scene();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        UeState u = some_ue(rng);
        for (const Path& p : {Path::direct(0), Path::reflected(1, 0), Path::monostatic(0)}) {
            UeState a = u, b = u, ab = u;
            a.velocity = random_vec(rng, -3, 3);
            b.velocity = random_vec(rng, -3, 3);
            ab.velocity = a.velocity + 2.5 * b.velocity;
            EXPECT_NEAR(doppler(p, s, ab), doppler(p, s, a) + 2.5 * doppler(p, s, b), 1e-9);
            UeState still = u;
            still.velocity.setZero();
            EXPECT_EQ(doppler(p, s, still), 0.0);
        }
    }
    UeState u;
    u.position = s.bss[0].position + Vec3(10, 0, 0);
    u.velocity = {-2, 0, 0};  // approaching
    EXPECT_NEAR(doppler(Path::direct(0), s, u), 2.0 / s.lambda(), 1e-9);
    u.position = s.riss[0].center + Vec3(0, 5, 0);
    u.velocity = {0, -1, 0};
    EXPECT_NEAR(doppler(Path::monostatic(0), s, u), 2.0 / s.lambda(), 1e-9);
}

TEST(Gradient, FiniteDifferenceMatchesAnalytic)
{
    const Scenario s = mixed_scene();
    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
        const UeState u = some_ue(rng);
        for (const Path& p : {Path::direct(2), Path::reflected(0, 0), Path::monostatic(0)}) {
            const Vec3 g = path_length_gradient(p, s, u);
            Vec3 fd;
            for (int k = 0; k < 3; ++k) {
                const double h = 1e-6 * std::max(1.0, std::abs(u.position[k]));
                UeState a = u, b = u;
                a.position[k] += h;
                b.position[k] -= h;
                fd[k] = (path_length(p, s, a) - path_length(p, s, b)) / (2 * h);
            }
            EXPECT_LT((fd - g).norm(), 1e-6 * g.norm());
        }
    }
}

TEST(Plan, SlotsPerKind)
{
    Scenario s = mixed_scene();
    const auto plan = measurement_plan(s);
    std::map<MeasurementKind, int> n;
    for (const auto& m : plan) ++n[m.kind];
    EXPECT_EQ(n[MeasurementKind::ToA], 3 + 3);      // 3 direct + 3 reflected
    EXPECT_EQ(n[MeasurementKind::TDoA], 5);         // against the first
    EXPECT_EQ(n[MeasurementKind::RTT], 3);
    EXPECT_EQ(n[MeasurementKind::AoD], 1 + 1);      // array BS + RIS
    EXPECT_EQ(n[MeasurementKind::AoA], 3 + 1);
    EXPECT_EQ(n[MeasurementKind::Doppler], 3 + 3);
}

TEST(Plan, BlockedLineOfSightDropsDirectRows)
{
    Scenario s = mixed_scene();
    s.los_blocked.insert("bs2");
    for (const auto& m : measurement_plan(s)) {
        if (m.path.type == Path::Type::Direct) {
            EXPECT_NE(m.path.bs, 1u) << to_string(m.kind);
        }
    }
}

TEST(Generate, DeterministicAndNoiselessMatchesModels)
{
    const ScenarioFile f = load_row(2);
    const MeasurementSet a = generate(f.scenario, *f.ue, {}, 7);
    const MeasurementSet b = generate(f.scenario, *f.ue, {}, 7);
    const MeasurementSet c = generate(f.scenario, *f.ue, {}, 8);
    ASSERT_EQ(a.items.size(), b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i) EXPECT_EQ(a.items[i].value1, b.items[i].value1);
    EXPECT_NE(a.items[0].value1, c.items[0].value1);

    const MeasurementSet z = generate(f.scenario, *f.ue, NoiseSigmas::zero(), 7);
    for (const auto& m : z.items) {
        const Eigen::Vector2d p = predict(m, f.scenario, *f.ue);
        EXPECT_EQ(m.value1, p[0]);
        if (m.is_angle()) {
            EXPECT_EQ(m.value2, p[1]);
        }
        EXPECT_EQ(m.sigma, 0.0);
    }
    EXPECT_LT(residuals(z, f.scenario, *f.ue).norm(), 1e-12);
}

TEST(Generate, NoiseHasRequestedSpread)
{
    const ScenarioFile f = load_row(1);
    NoiseSigmas n;
    n.toa = 2e-9;
    double sum = 0, sum2 = 0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const MeasurementSet m = generate(f.scenario, *f.ue, n, seed);
        for (const auto& x : m.items) {
            if (x.kind != MeasurementKind::ToA) continue;
            const double e = x.value1 - predict(x, f.scenario, *f.ue)[0];
            sum += e, sum2 += e * e, ++count;
        }
    }
    EXPECT_NEAR(sum / count, 0.0, 4 * 2e-9 / std::sqrt(count));
    EXPECT_NEAR(std::sqrt(sum2 / count), 2e-9, 0.1 * 2e-9);
}

TEST(Csv, RoundTripIsExact)
{
    const ScenarioFile f = load_row(10);
    const MeasurementSet m = generate(f.scenario, *f.ue, {}, 3);
    std::stringstream ss;
    write_csv(ss, m, f.scenario);
    EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "kind,node,ref_node,value1,value2,sigma,seed");
    const MeasurementSet back = read_csv(ss, f.scenario);
    ASSERT_EQ(back.items.size(), m.items.size());
    for (std::size_t i = 0; i < m.items.size(); ++i) {
        EXPECT_EQ(back.items[i].kind, m.items[i].kind);
        EXPECT_EQ(back.items[i].path, m.items[i].path);
        EXPECT_EQ(back.items[i].value1, m.items[i].value1);
        EXPECT_EQ(back.items[i].value2, m.items[i].value2);
        EXPECT_EQ(back.items[i].sigma, m.items[i].sigma);
    }
    EXPECT_EQ(back.seed, 3u);
}

TEST(Paths, LabelsRoundTrip)
{
    const Scenario s = mixed_scene();
    for (const Path& p : {Path::direct(2), Path::reflected(1, 0), Path::monostatic(0)})
        EXPECT_EQ(path_from_label(path_label(p, s), s), p);
    EXPECT_EQ(path_label(Path::reflected(1, 0), s), "bs2>ris1");
    EXPECT_THROW(path_from_label("bs7", s), ParseError);
}
