/**
 * @file geometry.hpp
 * @brief Constant-curvature surfaces M^2_kappa = { kappa (x^2 + y^2 + sigma z^2) = 1 }.
 *
 * For kappa > 0 the surface is a sphere of radius 1/sqrt(kappa); for kappa < 0
 * it is the two-sheeted hyperboloid, of which the dynamics uses the upper
 * sheet. The signed product a (.) b = a_x b_x + a_y b_y + sigma a_z b_z is
 * Euclidean on the sphere and Lorentzian on the hyperboloid.
 */
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace curved_nbody {

/// Raised when an input violates a domain invariant (bad curvature, collisions, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Nonzero Gaussian curvature together with its sign.
class Curvature {
public:
    explicit Curvature(double kappa) : kappa_(kappa) {
        if (!(kappa != 0.0) || !std::isfinite(kappa))
            throw DomainError("kappa must be finite and nonzero");
        sigma_ = kappa > 0.0 ? 1 : -1;
    }

    double kappa() const noexcept { return kappa_; }
    int sigma() const noexcept { return sigma_; }
    bool positive() const noexcept { return sigma_ > 0; }

    friend bool operator==(const Curvature&, const Curvature&) = default;

private:
    double kappa_;
    int sigma_;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3& operator+=(const Vec3& o) noexcept { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) noexcept { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) noexcept { x *= s; y *= s; z *= s; return *this; }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) noexcept { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) noexcept { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3& a) noexcept { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return a *= s; }
    friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return a *= s; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

    bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    /// Ambient Euclidean norm, used only for tolerance scaling.
    double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
};

constexpr double sigma_inner(const Vec3& a, const Vec3& b, int sigma) noexcept {
    return a.x * b.x + a.y * b.y + sigma * a.z * b.z;
}

inline double sigma_inner(const Vec3& a, const Vec3& b, const Curvature& c) noexcept {
    return sigma_inner(a, b, c.sigma());
}

/// kappa (p . p) - 1; zero iff p lies on the surface.
inline double surface_residual(const Vec3& p, const Curvature& c) noexcept {
    return c.kappa() * sigma_inner(p, p, c) - 1.0;
}

/// Radial rescale of p onto the surface.
/// Throws DomainError when p is outside the projectable cone kappa (p . p) > 0,
/// which for a trajectory means it has diverged.
inline Vec3 project_point(const Vec3& p, const Curvature& c) {
    const double q = c.kappa() * sigma_inner(p, p, c);
    if (!(q > 0.0) || !std::isfinite(q))
        throw DomainError("point is not projectable onto the curvature surface");
    if (q == 1.0) return p;
    Vec3 out = p * (1.0 / std::sqrt(q));
    // second pass removes the rounding left by the first
    const double q1 = c.kappa() * sigma_inner(out, out, c);
    if (q1 != 1.0 && std::isfinite(q1) && q1 > 0.0) out = out * (1.0 / std::sqrt(q1));
    return out;
}

/// Removes the normal component: v - kappa (p . v) p.
inline Vec3 project_tangent(const Vec3& p, const Vec3& v, const Curvature& c) noexcept {
    return v - (c.kappa() * sigma_inner(p, v, c)) * p;
}

}  // namespace curved_nbody
