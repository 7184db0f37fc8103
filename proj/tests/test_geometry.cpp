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

#include "risloc/constants.hpp"
#include "risloc/errors.hpp"
#include "risloc/geometry.hpp"
#include "support.hpp"

using namespace risloc;
using risloc::testing::random_euler;
using risloc::testing::random_vec;

TEST(Angles, WrapIntoHalfOpenInterval)
{
    EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
    EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
    EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
    EXPECT_NEAR(wrap_angle(7.0), 7.0 - kTwoPi, 1e-15);
    EXPECT_NEAR(wrap_positive(-0.5), kTwoPi - 0.5, 1e-15);
    EXPECT_EQ(wrap_positive(0.0), 0.0);
}

TEST(Rotation, ElementaryAxes)
{
    const Vec3 x = Vec3::UnitX(), y = Vec3::UnitY(), z = Vec3::UnitZ();
    EXPECT_LT((rot_z(kPi / 2) * x - y).norm(), 1e-15);
    EXPECT_LT((rot_y(kPi / 2) * z - x).norm(), 1e-15);
    EXPECT_LT((rot_x(kPi / 2) * y - z).norm(), 1e-15);
}

TEST(Rotation, GroupLaws)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const Rot3 a = rot_zyx(random_euler(rng)), b = rot_zyx(random_euler(rng)), c = rot_zyx(random_euler(rng));
        EXPECT_LT((a.transpose() * a - Rot3::Identity()).norm(), 1e-12);
        EXPECT_NEAR(a.determinant(), 1.0, 1e-12);
        EXPECT_LT(((a * b) * c - a * (b * c)).norm(), 1e-12);
        EXPECT_LT(((a * b).transpose() - b.transpose() * a.transpose()).norm(), 1e-12);
        const Vec3 v = random_vec(rng, -5, 5);
        EXPECT_LT((local_to_global(a, global_to_local(a, v)) - v).norm(), 1e-12);
        EXPECT_NEAR((a * v).norm(), v.norm(), 1e-12);
    }
}

TEST(Rotation, ZyxComposition)
{
    const EulerZYX e{0.3, -0.4, 1.1};
    EXPECT_LT((rot_zyx(e) - rot_z(0.3) * rot_y(-0.4) * rot_x(1.1)).norm(), 1e-15);
}

TEST(Rotation, EulerRoundTrip)
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 500; ++i) {
        const EulerZYX e = random_euler(rng, kPi / 2 - 1e-3);
        const EulerZYX back = euler_from_rotation(rot_zyx(e));
        EXPECT_NEAR(back.alpha, e.alpha, 1e-9);
        EXPECT_NEAR(back.beta, e.beta, 1e-9);
        EXPECT_NEAR(back.gamma, e.gamma, 1e-9);
    }
}

TEST(Rotation, GimbalLockKeepsRotation)
{
    const EulerZYX e{0.7, kPi / 2, 0.2};
    const EulerZYX back = euler_from_rotation(rot_zyx(e));
    EXPECT_EQ(back.gamma, 0.0);
    EXPECT_LT((rot_zyx(back) - rot_zyx(e)).norm(), 1e-12);
}

TEST(Direction, AzElConventions)
{
    const AzEl x = direction_to_azel(Vec3(1, 0, 0));
    EXPECT_EQ(x.azimuth, 0.0);
    EXPECT_EQ(x.elevation, 0.0);
    EXPECT_NEAR(direction_to_azel(Vec3(0, 2, 0)).azimuth, kPi / 2, 1e-15);
    EXPECT_NEAR(direction_to_azel(Vec3(0, 0, 3)).elevation, kPi / 2, 1e-15);
    EXPECT_EQ(direction_to_azel(Vec3(0, 0, 3)).azimuth, 0.0);
    EXPECT_EQ(direction_to_azel(Vec3(-1, -0.0, 0)).azimuth, kPi);
}

TEST(Direction, RoundTrip)
{
    std::mt19937_64 rng(13);
    for (int i = 0; i < 500; ++i) {
        const Vec3 v = random_vec(rng, -1, 1);
        const Vec3 back = azel_to_direction(direction_to_azel(v));
        EXPECT_LT((back - v.normalized()).norm(), 1e-12);
    }
}

TEST(Direction, ZeroVectorThrows)
{
    EXPECT_THROW(direction_to_azel(Vec3::Zero().eval()), DegenerateDirection);
    EXPECT_THROW(unit_direction(Vec3(1, 2, 3), Vec3(1, 2, 3)), DegenerateDirection);
    EXPECT_THROW(angle_between(Vec3::Zero().eval(), Vec3::UnitX().eval()), DegenerateDirection);
}

TEST(Direction, AngleBetweenIsRotationInvariant)
{
    std::mt19937_64 rng(14);
    for (int i = 0; i < 300; ++i) {
        const Vec3 a = random_vec(rng, -1, 1), b = random_vec(rng, -1, 1);
        const Rot3 r = rot_zyx(random_euler(rng));
        EXPECT_NEAR(angle_between(Vec3(r * a), Vec3(r * b)), angle_between(a, b), 1e-12);
    }
    EXPECT_NEAR(angle_between(Vec3(1, 0, 0), Vec3(1, 1e-9, 0)), 1e-9, 1e-20);
    EXPECT_NEAR(angle_between(Vec3(1, 0, 0), Vec3(-1, 1e-9, 0)), kPi - 1e-9, 1e-15);
}

TEST(Geometry, FloatInstantiation)
{
    const Vec3T<float> v(1.0f, 1.0f, 0.0f);
    const AzElT<float> a = direction_to_azel(v);
    EXPECT_NEAR(a.azimuth, static_cast<float>(kPi / 4), 1e-6f);
    EXPECT_NEAR((rot_zyx(EulerZYXT<float>{0.1f, 0.2f, 0.3f}).determinant()), 1.0f, 1e-6f);
}
