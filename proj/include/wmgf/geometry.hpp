#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace wmgf {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(Vec3 v) {
    const double n = norm(v);
    return {v.x / n, v.y / n, v.z / n};
}

/// Integer voxel offset within the 5x5x5 neighborhood.
struct IVec3 {
    int x = 0, y = 0, z = 0;

    friend IVec3 operator-(IVec3 v) { return {-v.x, -v.y, -v.z}; }
    friend bool operator==(const IVec3&, const IVec3&) = default;
};

inline Vec3 to_vec3(IVec3 v) {
    return {static_cast<double>(v.x), static_cast<double>(v.y), static_cast<double>(v.z)};
}

using Dims3 = std::array<std::size_t, 3>;

/// Flat index with x-fastest ordering: x + nx*(y + ny*z).
inline std::size_t flat_index(const Dims3& dims, std::size_t x, std::size_t y, std::size_t z) {
    return x + dims[0] * (y + dims[1] * z);
}

inline std::array<std::size_t, 3> grid_coords(const Dims3& dims, std::size_t flat) {
    const std::size_t x = flat % dims[0];
    const std::size_t y = (flat / dims[0]) % dims[1];
    const std::size_t z = flat / (dims[0] * dims[1]);
    return {x, y, z};
}

/// x^n for small non-negative integer n, by repeated multiplication.
/// Deterministic across platforms, unlike std::pow.
inline double int_pow(double x, unsigned n) {
    double r = 1.0;
    for (unsigned k = 0; k < n; ++k) r *= x;
    return r;
}

} // namespace wmgf
