#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace qma {

/// Quaternion q = t + x*i + y*j + z*k over doubles.
///
/// Sign convention used throughout the project: i*j = k, j*i = -k,
/// i^2 = j^2 = k^2 = -1, and H^n is a *right* H-module (scalars act by
/// right multiplication on coordinate vectors). See docs/conventions.md.
struct Quaternion {
    double t = 0.0, x = 0.0, y = 0.0, z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double t_, double x_, double y_, double z_)
        : t(t_), x(x_), y(y_), z(z_) {}
    static constexpr Quaternion real(double a) { return {a, 0, 0, 0}; }
    static constexpr Quaternion unit_i() { return {0, 1, 0, 0}; }
    static constexpr Quaternion unit_j() { return {0, 0, 1, 0}; }
    static constexpr Quaternion unit_k() { return {0, 0, 0, 1}; }

    constexpr Quaternion conj() const { return {t, -x, -y, -z}; }
    constexpr double norm_sq() const { return t * t + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm_sq()); }
    constexpr double re() const { return t; }

    constexpr Quaternion operator-() const { return {-t, -x, -y, -z}; }
    constexpr Quaternion& operator+=(const Quaternion& o) {
        t += o.t; x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o) {
        t -= o.t; x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }
    constexpr Quaternion& operator*=(double s) {
        t *= s; x *= s; y *= s; z *= s;
        return *this;
    }

    friend constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
    friend constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
    friend constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
    friend constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }
};

/// Hamilton product with the i*j = k convention.
constexpr Quaternion multiply(const Quaternion& q, const Quaternion& p) {
    return {q.t * p.t - q.x * p.x - q.y * p.y - q.z * p.z,
            q.t * p.x + q.x * p.t + q.y * p.z - q.z * p.y,
            q.t * p.y - q.x * p.z + q.y * p.t + q.z * p.x,
            q.t * p.z + q.x * p.y - q.y * p.x + q.z * p.t};
}
constexpr Quaternion operator*(const Quaternion& q, const Quaternion& p) {
    return multiply(q, p);
}

/// Unit imaginary direction a1*I + a2*J + a3*K on the 2-sphere.
struct ImaginaryDirection {
    double a1 = 1.0, a2 = 0.0, a3 = 0.0;
    constexpr Quaternion as_quaternion() const { return {0.0, a1, a2, a3}; }
    double norm_defect() const { return a1 * a1 + a2 * a2 + a3 * a3 - 1.0; }
};

/// Point/tangent vector of H^n as a right H-module.
using QuaternionVector = std::vector<Quaternion>;

/// Right action v -> v o q: every component c becomes c*q.
inline QuaternionVector right_act(const QuaternionVector& v, const Quaternion& q) {
    QuaternionVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * q;
    return out;
}

inline double euclidean_norm(const QuaternionVector& v) {
    double s = 0.0;
    for (const auto& c : v) s += c.norm_sq();
    return std::sqrt(s);
}

/// splitmix64: cheap seed-derivation step for independent substreams.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97f4A7C15ULL;
    std::uint64_t r = state;
    r = (r ^ (r >> 30)) * 0xBF58476D1CE4E5B9ULL;
    r = (r ^ (r >> 27)) * 0x94D049BB133111EBULL;
    return r ^ (r >> 31);
}

/// Unit quaternions distributed by the Haar measure on SU(2) = S^3,
/// realized as a normalized 4D Gaussian. Deterministic per seed.
std::vector<Quaternion> haar_sample_su2(std::uint64_t seed, std::size_t count);

}  // namespace qma
