#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace bcs {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a * s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
    friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) {
    const double len = length(a);
    return len > 0 ? a / len : Vec3{};
}
constexpr Vec3 lerp(Vec3 a, Vec3 b, double t) { return a + (b - a) * t; }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Cosine/sine of an angle in degrees, exact at multiples of 90.
inline double cos_deg(double deg) {
    const double r = std::fmod(deg, 360.0);
    const double a = r < 0 ? r + 360.0 : r;
    if (a == 0) return 1;
    if (a == 90 || a == 270) return 0;
    if (a == 180) return -1;
    return std::cos(deg_to_rad(deg));
}
inline double sin_deg(double deg) {
    const double r = std::fmod(deg, 360.0);
    const double a = r < 0 ? r + 360.0 : r;
    if (a == 0 || a == 180) return 0;
    if (a == 90) return 1;
    if (a == 270) return -1;
    return std::sin(deg_to_rad(deg));
}

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

    static constexpr Mat3 identity() { return {}; }

    constexpr double operator()(int r, int c) const { return m[r][c]; }
    constexpr double& operator()(int r, int c) { return m[r][c]; }

    friend constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += a.m[r][k] * b.m[k][c];
                out.m[r][c] = s;
            }
        return out;
    }
    friend constexpr Vec3 operator*(const Mat3& a, Vec3 v) {
        return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
                a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
                a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
    }
    constexpr Mat3 transposed() const {
        Mat3 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) out.m[r][c] = m[c][r];
        return out;
    }
    constexpr double determinant() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
    Mat3 inverse() const {
        const double det = determinant();
        Mat3 out;
        out.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
        out.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
        out.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
        out.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
        out.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
        out.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
        out.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
        out.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
        out.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
        return out;
    }
    /// Max absolute deviation of R·Rᵀ from identity.
    double orthonormality_error() const {
        const Mat3 p = *this * transposed();
        double err = 0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) err = std::max(err, std::abs(p.m[r][c] - (r == c ? 1.0 : 0.0)));
        return err;
    }
};

inline Mat3 rotation_x(double deg) {
    const double c = cos_deg(deg), s = sin_deg(deg);
    Mat3 r;
    r.m = {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
    return r;
}
inline Mat3 rotation_y(double deg) {
    const double c = cos_deg(deg), s = sin_deg(deg);
    Mat3 r;
    r.m = {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
    return r;
}
inline Mat3 rotation_z(double deg) {
    const double c = cos_deg(deg), s = sin_deg(deg);
    Mat3 r;
    r.m = {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
    return r;
}
/// Rz(az)·Ry(ay)·Rx(ax): x is applied first.
inline Mat3 rotation_xyz(Vec3 deg) { return rotation_z(deg.z) * rotation_y(deg.y) * rotation_x(deg.x); }

/// Rotation by `deg` about a unit axis (right-handed).
inline Mat3 rotation_axis(Vec3 axis, double deg) {
    const double c = cos_deg(deg), s = sin_deg(deg), t = 1 - c;
    const double x = axis.x, y = axis.y, z = axis.z;
    Mat3 r;
    r.m = {{{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
            {t * x * y + s * z, t * y * y + c, t * y * z - s * x},
            {t * x * z - s * y, t * y * z + s * x, t * z * z + c}}};
    return r;
}

/// Angles (ax, ay, az) in degrees with R = Rz(az)·Ry(ay)·Rx(ax), ay in [-90, 90], ax and az in
/// (-180, 180]. At gimbal lock ax is 0 and the remaining turn goes to az.
inline Vec3 euler_xyz(const Mat3& r) {
    auto wrap = [](double deg) {
        if (deg <= -180.0) deg += 360.0;
        if (deg > 180.0) deg -= 360.0;
        return deg == 0 ? 0.0 : deg;
    };
    const double cy = std::sqrt(r(2, 1) * r(2, 1) + r(2, 2) * r(2, 2));
    const double ay = rad_to_deg(std::atan2(-r(2, 0), cy));
    if (cy < 1e-9) return {0, ay, wrap(rad_to_deg(std::atan2(-r(0, 1), r(1, 1))))};
    return {wrap(rad_to_deg(std::atan2(r(2, 1), r(2, 2)))), ay, wrap(rad_to_deg(std::atan2(r(1, 0), r(0, 0))))};
}

/// Affine 4x4 matrix, row-major, last row (0,0,0,1).
struct Mat4 {
    std::array<std::array<double, 4>, 4> m{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};

    static constexpr Mat4 identity() { return {}; }
    static Mat4 translation(Vec3 v) {
        Mat4 out;
        out.m[0][3] = v.x;
        out.m[1][3] = v.y;
        out.m[2][3] = v.z;
        return out;
    }
    static Mat4 scaling(Vec3 s) {
        Mat4 out;
        out.m[0][0] = s.x;
        out.m[1][1] = s.y;
        out.m[2][2] = s.z;
        return out;
    }
    static Mat4 from_linear(const Mat3& l, Vec3 t = {}) {
        Mat4 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) out.m[r][c] = l.m[r][c];
        out.m[0][3] = t.x;
        out.m[1][3] = t.y;
        out.m[2][3] = t.z;
        return out;
    }

    constexpr double operator()(int r, int c) const { return m[r][c]; }

    Mat3 linear() const {
        Mat3 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) out.m[r][c] = m[r][c];
        return out;
    }
    Vec3 translation_part() const { return {m[0][3], m[1][3], m[2][3]}; }

    friend constexpr Mat4 operator*(const Mat4& a, const Mat4& b) {
        Mat4 out;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += a.m[r][k] * b.m[k][c];
                out.m[r][c] = s;
            }
        return out;
    }
    /// Transforms a point.
    constexpr Vec3 apply(Vec3 p) const {
        return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z + m[0][3],
                m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z + m[1][3],
                m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z + m[2][3]};
    }
    Mat4 inverse() const {
        const Mat3 inv = linear().inverse();
        return from_linear(inv, -(inv * translation_part()));
    }
    bool is_identity() const { return *this == Mat4{}; }
    friend constexpr bool operator==(const Mat4&, const Mat4&) = default;
};

}  // namespace bcs
