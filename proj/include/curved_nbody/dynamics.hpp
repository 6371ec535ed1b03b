/**
 * @file dynamics.hpp
 * @brief Curved n-body equations of motion, a projected RK4 integrator, and
 * builders for rigidly rotating polygon states.
 *
 * Body i obeys
 *
 *   q_i'' = sum_{j != i} m_j |kappa|^{3/2} [q_j - (kappa q_i.q_j) q_i]
 *                        / [sigma - sigma (kappa q_i.q_j)^2]^{3/2}
 *           - (kappa q_i'.q_i') q_i
 *
 * where "." is the sigma inner product of geometry.hpp. The last term keeps
 * the motion on the surface.
 */
#pragma once

#include "criterion.hpp"
#include "geometry.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace curved_nbody {

/// A pair of bodies collided, or (on the sphere) became antipodal.
class SingularConfiguration : public DomainError {
public:
    using DomainError::DomainError;
};

/// No nonnegative angular velocity balances the radial force.
class NoBalanceError : public DomainError {
public:
    using DomainError::DomainError;
};

inline constexpr double singular_threshold = 1e-12;
inline constexpr double state_tolerance = 1e-10;

struct BodySystem {
    Curvature curvature{1.0};
    std::vector<double> masses;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;

    std::size_t size() const noexcept { return masses.size(); }

    /// Throws DomainError unless every invariant holds within tol.
    void check(double tol = state_tolerance) const;
};

struct IntegratorConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    bool project_each_step = true;
    double max_constraint_drift = 1e-8;
};

struct Diagnostics {
    double max_surface_residual = 0.0;
    double max_tangency_residual = 0.0;
    /// min over pairs of |sigma - sigma (kappa q_i.q_j)^2|; +inf for a single body
    double min_pair_denominator = std::numeric_limits<double>::infinity();
};

inline Diagnostics diagnostics(const BodySystem& sys) {
    Diagnostics d;
    const auto& c = sys.curvature;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        d.max_surface_residual = std::max(d.max_surface_residual, std::abs(surface_residual(sys.positions[i], c)));
        d.max_tangency_residual =
            std::max(d.max_tangency_residual, std::abs(sigma_inner(sys.positions[i], sys.velocities[i], c)));
        for (std::size_t j = i + 1; j < sys.size(); ++j) {
            const double w = c.kappa() * sigma_inner(sys.positions[i], sys.positions[j], c);
            d.min_pair_denominator = std::min(d.min_pair_denominator, std::abs(c.sigma() * (1.0 - w * w)));
        }
    }
    return d;
}

inline void BodySystem::check(double tol) const {
    if (positions.size() != masses.size() || velocities.size() != masses.size())
        throw DomainError("body system: masses, positions and velocities differ in length");
    for (double m : masses)
        if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("masses: every mass must be positive");
    for (std::size_t i = 0; i < size(); ++i) {
        if (!positions[i].finite() || !velocities[i].finite())
            throw DomainError("body system: non-finite state at body " + std::to_string(i + 1));
        if (std::abs(surface_residual(positions[i], curvature)) > tol)
            throw DomainError("body system: body " + std::to_string(i + 1) + " is off the surface");
        if (std::abs(sigma_inner(positions[i], velocities[i], curvature)) > tol)
            throw DomainError("body system: velocity of body " + std::to_string(i + 1) + " is not tangent");
        if (!curvature.positive() && positions[i].z <= 0.0)
            throw DomainError("body system: body " + std::to_string(i + 1) + " is not on the upper sheet");
    }
    const auto d = diagnostics(*this);
    if (d.min_pair_denominator < singular_threshold)
        throw SingularConfiguration("body system: collision or antipodal pair");
}

/// The j-th summand of the force sum acting on body i.
inline Vec3 pair_acceleration(const Vec3& qi, const Vec3& qj, double mj, const Curvature& c) {
    const double w = c.kappa() * sigma_inner(qi, qj, c);
    const double base = c.sigma() * (1.0 - w * w);
    const double denom = base > 0.0 ? base * std::sqrt(base) : 0.0;
    if (!(denom >= singular_threshold)) throw SingularConfiguration("singular pair configuration");
    const double k = std::abs(c.kappa());
    return (mj * k * std::sqrt(k) / denom) * (qj - w * qi);
}

namespace detail {

inline std::vector<Vec3> acceleration(const Curvature& c, const std::vector<double>& masses,
                                      const std::vector<Vec3>& q, const std::vector<Vec3>& v) {
    const std::size_t n = masses.size();
    std::vector<Vec3> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 acc{};
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) acc += pair_acceleration(q[i], q[j], masses[j], c);
        acc -= (c.kappa() * sigma_inner(v[i], v[i], c)) * q[i];
        a[i] = acc;
    }
    return a;
}

}  // namespace detail

inline std::vector<Vec3> acceleration(const BodySystem& sys) {
    return detail::acceleration(sys.curvature, sys.masses, sys.positions, sys.velocities);
}

/// Thrown by step/integrate when the constraint residual exceeds the drift guard.
class DriftError : public std::runtime_error {
public:
    DriftError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// One classical RK4 step of size h on the ambient ODE, optionally followed
/// by projection back onto the surface and its tangent spaces.
inline BodySystem step_by(const BodySystem& sys, double h, const IntegratorConfig& cfg) {
    if (h == 0.0) return sys;
    const std::size_t n = sys.size();
    const auto& c = sys.curvature;
    const auto& q0 = sys.positions;
    const auto& v0 = sys.velocities;

    auto shifted = [n](const std::vector<Vec3>& base, const std::vector<Vec3>& d, double s) {
        std::vector<Vec3> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + s * d[i];
        return out;
    };

    const auto k1q = v0;
    const auto k1v = detail::acceleration(c, sys.masses, q0, v0);
    const auto q2 = shifted(q0, k1q, 0.5 * h);
    const auto k2q = shifted(v0, k1v, 0.5 * h);
    const auto k2v = detail::acceleration(c, sys.masses, q2, k2q);
    const auto q3 = shifted(q0, k2q, 0.5 * h);
    const auto k3q = shifted(v0, k2v, 0.5 * h);
    const auto k3v = detail::acceleration(c, sys.masses, q3, k3q);
    const auto q4 = shifted(q0, k3q, h);
    const auto k4q = shifted(v0, k3v, h);
    const auto k4v = detail::acceleration(c, sys.masses, q4, k4q);

    BodySystem next{c, sys.masses, std::vector<Vec3>(n), std::vector<Vec3>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        next.positions[i] = q0[i] + (h / 6.0) * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]);
        next.velocities[i] = v0[i] + (h / 6.0) * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        if (cfg.project_each_step) {
            next.positions[i] = project_point(next.positions[i], c);
            next.velocities[i] = project_tangent(next.positions[i], next.velocities[i], c);
        }
    }
    const auto d = diagnostics(next);
    const double drift = std::max(d.max_surface_residual, d.max_tangency_residual);
    if (!(drift <= cfg.max_constraint_drift))
        throw DriftError("constraint drift exceeds guard", drift);
    return next;
}

inline BodySystem step(const BodySystem& sys, const IntegratorConfig& cfg) { return step_by(sys, cfg.dt, cfg); }

struct TrajectorySample {
    double t = 0.0;
    BodySystem state;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
};

/// Integration stopped early. Carries the time of the last good sample.
class IntegrationAborted : public std::runtime_error {
public:
    enum class Reason { singular, drift, diverged };
    IntegrationAborted(const std::string& what, double time, Reason reason)
        : std::runtime_error(what), time_(time), reason_(reason) {}
    double time() const noexcept { return time_; }
    Reason reason() const noexcept { return reason_; }

private:
    double time_;
    Reason reason_;
};

/// Number of steps used to cover t_end with steps of at most dt.
inline std::size_t step_count(const IntegratorConfig& cfg) {
    if (cfg.t_end <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt * (1.0 - 1e-12)));
}

/// Steps from t = 0 to t_end. The observer sees (t, state, diagnostics) for
/// the initial sample and after every step; the final step is shortened to
/// land on t_end exactly.
template <class Observer>
Trajectory integrate(const BodySystem& sys, const IntegratorConfig& cfg, Observer&& observer) {
    if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw DomainError("t_end: must be nonnegative");
    if (cfg.t_end > 0.0 && !(cfg.dt > 0.0)) throw DomainError("dt: must be positive");
    if (!(cfg.max_constraint_drift > 0.0)) throw DomainError("max_constraint_drift: must be positive");

    Trajectory traj;
    const std::size_t steps = step_count(cfg);
    traj.samples.reserve(steps + 1);
    traj.samples.push_back({0.0, sys});
    observer(0.0, sys, diagnostics(sys));

    BodySystem cur = sys;
    double t = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_next = k == steps ? cfg.t_end : static_cast<double>(k) * cfg.dt;
        try {
            cur = step_by(cur, t_next - t, cfg);
        } catch (const SingularConfiguration& e) {
            throw IntegrationAborted(e.what(), t, IntegrationAborted::Reason::singular);
        } catch (const DriftError& e) {
            throw IntegrationAborted(e.what(), t, IntegrationAborted::Reason::drift);
        } catch (const DomainError& e) {
            throw IntegrationAborted(e.what(), t, IntegrationAborted::Reason::diverged);
        }
        t = t_next;
        traj.samples.push_back({t, cur});
        observer(t, traj.samples.back().state, diagnostics(cur));
    }
    return traj;
}

inline Trajectory integrate(const BodySystem& sys, const IntegratorConfig& cfg) {
    return integrate(sys, cfg, [](double, const BodySystem&, const Diagnostics&) {});
}

// ---------------------------------------------------------------------------
// rigidly rotating polygons

/// Polygon on the circle of radius r at height z, rotating at omega_dot.
struct RelativeEquilibrium {
    PolygonConfig polygon;
    double r = 0.0;
    double omega_dot = 0.0;
    double z = 0.0;

    /// Resolves z >= 0 from z^2 = sigma/kappa - sigma r^2.
    static RelativeEquilibrium make(PolygonConfig polygon, double r, double omega_dot, const Curvature& c) {
        if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("r: must be positive");
        if (!std::isfinite(omega_dot)) throw DomainError("omega_dot: must be finite");
        const double z2 = c.sigma() / c.kappa() - c.sigma() * r * r;
        if (c.positive() && c.kappa() * r * r > 1.0) throw DomainError("r: exceeds the sphere radius");
        return {std::move(polygon), r, omega_dot, std::sqrt(std::max(z2, 0.0))};
    }
};

inline BodySystem build_polygon_state(const RelativeEquilibrium& req, const MassVector& masses, const Curvature& c,
                                      double omega0 = 0.0) {
    const std::size_t n = req.polygon.size();
    if (masses.size() != n) throw DomainError("masses: expected one mass per vertex");
    const double z2 = c.sigma() / c.kappa() - c.sigma() * req.r * req.r;
    if (z2 < -1e-12 || std::abs(req.z * req.z - z2) > 1e-12 * std::max(1.0, std::abs(z2)))
        throw DomainError("r and z are inconsistent with the curvature");
    BodySystem sys{c, masses.values(), std::vector<Vec3>(n), std::vector<Vec3>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = omega0 + req.polygon[i].radians();
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        sys.positions[i] = {req.r * ct, req.r * st, req.z};
        sys.velocities[i] = {-req.r * req.omega_dot * st, req.r * req.omega_dot * ct, 0.0};
    }
    sys.check();
    return sys;
}

/// Angular velocity of the rigidly rotating regular equal-mass polygon of radius r.
///
/// Solves for s = omega_dot^2 the radial balance
///   a_r(s) + r s = 0,
/// a_r being the radial component of the full acceleration (force sum plus
/// constraint term) of body 1 in the state rotating at sqrt(s).
inline double solve_omega(const PolygonConfig& polygon, const MassVector& masses, double r, const Curvature& c) {
    if (!is_regular(polygon)) throw NoBalanceError("solve_omega requires a regular polygon");
    if (masses.size() != polygon.size()) throw DomainError("masses: expected one mass per vertex");
    for (std::size_t i = 1; i < masses.size(); ++i)
        if (std::abs(masses[i] - masses[0]) > 1e-12 * masses[0])
            throw NoBalanceError("solve_omega requires equal masses");
    if (std::abs(1.0 - c.kappa() * r * r) < 1e-12)
        throw NoBalanceError("the equator admits no radial balance");

    auto residual = [&](double s) {
        const auto req = RelativeEquilibrium::make(polygon, r, std::sqrt(s), c);
        const auto sys = build_polygon_state(req, masses, c);
        const auto a = acceleration(sys);
        const double theta = polygon[0].radians();
        const double radial = a[0].x * std::cos(theta) + a[0].y * std::sin(theta);
        return radial + r * s;
    };

    const double f0 = residual(0.0);
    if (f0 == 0.0) return 0.0;
    if (f0 > 0.0) throw NoBalanceError("radial force points outward; no rotation balances it");
    double hi = 1.0;
    double fhi = residual(hi);
    for (int i = 0; i < 200 && fhi < 0.0; ++i) {
        hi *= 4.0;
        fhi = residual(hi);
    }
    if (!(fhi > 0.0)) throw NoBalanceError("no nonnegative root of the radial balance");
    if (fhi == 0.0) return std::sqrt(hi);

    std::uintmax_t max_iter = 200;
    const auto [lo_s, hi_s] = boost::math::tools::toms748_solve(
        residual, 0.0, hi, f0, fhi, boost::math::tools::eps_tolerance<double>(52), max_iter);
    return std::sqrt(0.5 * (lo_s + hi_s));
}

/// Pairwise chord values 1 - cos(theta_j - theta_i) of the azimuths of the bodies.
inline std::vector<double> azimuth_chords(const BodySystem& sys) {
    std::vector<double> out;
    for (std::size_t i = 0; i < sys.size(); ++i)
        for (std::size_t j = i + 1; j < sys.size(); ++j) {
            const double ti = std::atan2(sys.positions[i].y, sys.positions[i].x);
            const double tj = std::atan2(sys.positions[j].y, sys.positions[j].x);
            const double h = std::sin(0.5 * (tj - ti));
            out.push_back(2.0 * h * h);
        }
    return out;
}

}  // namespace curved_nbody
