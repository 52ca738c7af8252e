// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>

namespace invren {

// Small fixed-size vector types, templated on the scalar so the same
// geometry code runs on plain doubles and on autodiff variables.
template <class R>
struct TVec3 {
    R x{}, y{}, z{};

    TVec3() = default;
    TVec3(R x_, R y_, R z_) : x(x_), y(y_), z(z_) {}

    R& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    const R& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

template <class R>
struct TVec2 {
    R x{}, y{};
    TVec2() = default;
    TVec2(R x_, R y_) : x(x_), y(y_) {}
};

using Vec3 = TVec3<double>;
using Vec2 = TVec2<double>;

template <class R> TVec3<R> operator+(const TVec3<R>& a, const TVec3<R>& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
template <class R> TVec3<R> operator-(const TVec3<R>& a, const TVec3<R>& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
template <class R> TVec3<R> operator-(const TVec3<R>& a) { return {-a.x, -a.y, -a.z}; }
template <class R> TVec3<R> operator*(const TVec3<R>& a, const R& s) { return {a.x * s, a.y * s, a.z * s}; }
template <class R> TVec3<R> operator*(const R& s, const TVec3<R>& a) { return a * s; }
template <class R> TVec3<R> operator*(const TVec3<R>& a, const TVec3<R>& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
template <class R> TVec3<R> operator/(const TVec3<R>& a, const R& s) { return {a.x / s, a.y / s, a.z / s}; }
template <class R> TVec3<R>& operator+=(TVec3<R>& a, const TVec3<R>& b) { a = a + b; return a; }
template <class R> TVec3<R>& operator-=(TVec3<R>& a, const TVec3<R>& b) { a = a - b; return a; }
template <class R> TVec3<R>& operator*=(TVec3<R>& a, const R& s) { a = a * s; return a; }

// Mixed double scaling for non-double R (autodiff vars scaled by constants).
template <class R> TVec3<R> operator*(const TVec3<R>& a, double s) requires(!std::is_same_v<R, double>) { return {a.x * s, a.y * s, a.z * s}; }
template <class R> TVec3<R> operator*(double s, const TVec3<R>& a) requires(!std::is_same_v<R, double>) { return a * s; }

template <class R> R dot(const TVec3<R>& a, const TVec3<R>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

template <class R>
TVec3<R> cross(const TVec3<R>& a, const TVec3<R>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <class R> R length_squared(const TVec3<R>& a) { return dot(a, a); }
template <class R> R length(const TVec3<R>& a) { using std::sqrt; return sqrt(dot(a, a)); }

template <class R> TVec3<R> normalize(const TVec3<R>& a) { return a / length(a); }

inline Vec3 min(const Vec3& a, const Vec3& b) { return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)}; }
inline Vec3 max(const Vec3& a, const Vec3& b) { return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)}; }

inline double max_component(const Vec3& a) { return std::max(a.x, std::max(a.y, a.z)); }

// Axis-aligned box. Used for scene bounds and BVH nodes.
struct Aabb {
    Vec3 lo{1e30, 1e30, 1e30};
    Vec3 hi{-1e30, -1e30, -1e30};

    bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
    Vec3 extent() const { return hi - lo; }
    Vec3 center() const { return (lo + hi) * 0.5; }

    void grow(const Vec3& p) { lo = min(lo, p); hi = max(hi, p); }
    void grow(const Aabb& b) { lo = min(lo, b.lo); hi = max(hi, b.hi); }

    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
    }

    // Slab test. Returns false when the ray misses; otherwise [t0,t1] is the
    // parametric overlap clipped to [tmin,tmax].
    bool intersect(const Vec3& o, const Vec3& inv_d, double tmin, double tmax, double* t0 = nullptr, double* t1 = nullptr) const {
        for (int a = 0; a < 3; ++a) {
            double ta = (lo[a] - o[a]) * inv_d[a];
            double tb = (hi[a] - o[a]) * inv_d[a];
            if (ta > tb) std::swap(ta, tb);
            tmin = std::max(tmin, ta);
            tmax = std::min(tmax, tb);
            if (tmin > tmax) return false;
        }
        if (t0) *t0 = tmin;
        if (t1) *t1 = tmax;
        return true;
    }
};

// Orthonormal basis around a unit vector n. Branchless Frisvad-style.
inline void make_basis(const Vec3& n, Vec3* t, Vec3* b) {
    const double sign = std::copysign(1.0, n.z);
    const double a = -1.0 / (sign + n.z);
    *t = {1.0 + sign * n.x * n.x * a, sign * n.x * n.y * a, -sign * n.x};
    *b = {n.x * n.y * a, sign + n.y * n.y * a, -n.y};
}

}  // namespace invren
