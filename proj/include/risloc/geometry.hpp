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

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "risloc/constants.hpp"
#include "risloc/errors.hpp"

namespace risloc {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Rot3T = Eigen::Matrix<Scalar, 3, 3>;

using Vec3 = Vec3T<double>;
using Rot3 = Rot3T<double>;

/*!
 * Intrinsic Z-Y'-X'' Euler angles in radians.
 *
 * alpha is yaw about z, beta pitch about the once-rotated y', gamma roll about
 * the twice-rotated x''. Canonical ranges: alpha, gamma in (-pi, pi],
 * beta in [-pi/2, pi/2].
 */
template <typename Scalar>
struct EulerZYXT
{
    Scalar alpha{0};
    Scalar beta{0};
    Scalar gamma{0};

    bool operator==(const EulerZYXT&) const = default;
};
using EulerZYX = EulerZYXT<double>;

/// Azimuth in (-pi, pi], elevation in [-pi/2, pi/2] measured from the xy-plane.
template <typename Scalar>
struct AzElT
{
    Scalar azimuth{0};
    Scalar elevation{0};

    bool operator==(const AzElT&) const = default;
};
using AzEl = AzElT<double>;

/// Wraps an angle to (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a)
{
    using std::remainder;
    Scalar w = remainder(a, Scalar(kTwoPi));  // [-pi, pi]
    if (w <= -Scalar(kPi)) w += Scalar(kTwoPi);
    return w;
}

/// Wraps an angle to [0, 2 pi).
template <typename Scalar>
Scalar wrap_positive(Scalar a)
{
    using std::fmod;
    Scalar w = fmod(a, Scalar(kTwoPi));
    if (w < Scalar(0)) w += Scalar(kTwoPi);
    if (w >= Scalar(kTwoPi)) w = Scalar(0);
    return w;
}

template <typename Scalar>
Rot3T<Scalar> rot_z(Scalar a)
{
    using std::cos;
    using std::sin;
    Rot3T<Scalar> r;
    r << cos(a), -sin(a), 0, sin(a), cos(a), 0, 0, 0, 1;
    return r;
}

template <typename Scalar>
Rot3T<Scalar> rot_y(Scalar a)
{
    using std::cos;
    using std::sin;
    Rot3T<Scalar> r;
    r << cos(a), 0, sin(a), 0, 1, 0, -sin(a), 0, cos(a);
    return r;
}

template <typename Scalar>
Rot3T<Scalar> rot_x(Scalar a)
{
    using std::cos;
    using std::sin;
    Rot3T<Scalar> r;
    r << 1, 0, 0, 0, cos(a), -sin(a), 0, sin(a), cos(a);
    return r;
}

/// R = Rz(alpha) Ry(beta) Rx(gamma); R maps local vectors to global ones.
template <typename Scalar>
Rot3T<Scalar> rot_zyx(const EulerZYXT<Scalar>& e)
{
    return rot_z(e.alpha) * rot_y(e.beta) * rot_x(e.gamma);
}

/// Inverse of rot_zyx. At gimbal lock (|beta| = pi/2) gamma is set to 0.
template <typename Scalar>
EulerZYXT<Scalar> euler_from_rotation(const Rot3T<Scalar>& r)
{
    using std::asin;
    using std::atan2;
    using std::clamp;
    EulerZYXT<Scalar> e;
    const Scalar s = clamp(-r(2, 0), Scalar(-1), Scalar(1));
    e.beta = asin(s);
    if (Scalar(1) - std::abs(s) < Scalar(1e-12)) {
        e.gamma = Scalar(0);
        e.alpha = atan2(-r(0, 1), r(1, 1));
    } else {
        e.alpha = atan2(r(1, 0), r(0, 0));
        e.gamma = atan2(r(2, 1), r(2, 2));
    }
    e.alpha = wrap_angle(e.alpha);
    e.gamma = wrap_angle(e.gamma);
    return e;
}

template <typename Scalar>
Vec3T<Scalar> global_to_local(const Rot3T<Scalar>& r, const Vec3T<Scalar>& v)
{
    return r.transpose() * v;
}

template <typename Scalar>
Vec3T<Scalar> local_to_global(const Rot3T<Scalar>& r, const Vec3T<Scalar>& v)
{
    return r * v;
}

/// az = atan2(y, x), el = asin(z/|u|). At the poles azimuth is 0; -pi maps to +pi.
template <typename Scalar>
AzElT<Scalar> direction_to_azel(const Vec3T<Scalar>& u)
{
    using std::asin;
    using std::atan2;
    const Scalar n = u.norm();
    if (!(n > Scalar(0))) throw DegenerateDirection();
    AzElT<Scalar> a;
    a.elevation = asin(std::clamp(u.z() / n, Scalar(-1), Scalar(1)));
    if (u.x() == Scalar(0) && u.y() == Scalar(0)) {
        a.azimuth = Scalar(0);
    } else {
        a.azimuth = atan2(u.y(), u.x());
        if (a.azimuth <= -Scalar(kPi)) a.azimuth = Scalar(kPi);
    }
    return a;
}

template <typename Scalar>
Vec3T<Scalar> azel_to_direction(const AzElT<Scalar>& a)
{
    using std::cos;
    using std::sin;
    const Scalar ce = cos(a.elevation);
    return Vec3T<Scalar>(ce * cos(a.azimuth), ce * sin(a.azimuth), sin(a.elevation));
}

/// Unit vector from `from` to `to`.
template <typename Scalar>
Vec3T<Scalar> unit_direction(const Vec3T<Scalar>& from, const Vec3T<Scalar>& to)
{
    const Vec3T<Scalar> d = to - from;
    const Scalar n = d.norm();
    if (!(n > Scalar(0))) throw DegenerateDirection();
    return d / n;
}

/// Angle in [0, pi] between two nonzero vectors.
template <typename Scalar>
Scalar angle_between(const Vec3T<Scalar>& u, const Vec3T<Scalar>& v)
{
    using std::atan2;
    const Scalar nu = u.norm();
    const Scalar nv = v.norm();
    if (!(nu > Scalar(0)) || !(nv > Scalar(0))) throw DegenerateDirection();
    // Same value as acos of the clamped cosine, without the loss of precision near 0 and pi.
    const Vec3T<Scalar> a = u / nu;
    const Vec3T<Scalar> b = v / nv;
    return atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace risloc
