/**
 * @file criterion.hpp
 * @brief Polygonal configurations and the delta/gamma criterion for
 * homographic orbits.
 *
 * Vertex i sits at angle alpha_i on a circle of radius r; with
 * rho = kappa r^2 the per-pair kernels are
 *
 *   mu_ji = 1 / (c_ji^{1/2} (2 - c_ji rho)^{3/2})
 *   nu_ji = s_ji / (c_ji^{3/2} (2 - c_ji rho)^{3/2})
 *
 * with c_ji = 1 - cos(alpha_j - alpha_i) and s_ji = sin(alpha_j - alpha_i).
 * A polygonal homographic orbit exists iff all delta_i = sum_j m_j mu_ji
 * coincide and all gamma_i = sum_j m_j nu_ji coincide.
 */
#pragma once

#include "angles.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace curved_nbody {

enum class AngleMode { exact, floating };

/// Strictly increasing vertex angles in [0, 2 pi), n >= 3, one representation.
class PolygonConfig {
public:
    explicit PolygonConfig(std::vector<Angle> angles) : angles_(std::move(angles)) {
        if (angles_.size() < 3) throw DomainError("angles: a polygon needs at least 3 vertices");
        mode_ = angles_.front().is_exact() ? AngleMode::exact : AngleMode::floating;
        for (std::size_t i = 0; i < angles_.size(); ++i) {
            if (angles_[i].is_exact() != (mode_ == AngleMode::exact))
                throw DomainError("angles: exact and radian values cannot be mixed");
            if (i > 0 && !less(i - 1, i))
                throw DomainError("angles: must be strictly increasing");
        }
    }

    static PolygonConfig from_turns(std::span<const Turn> turns) {
        std::vector<Angle> a;
        a.reserve(turns.size());
        for (const auto& t : turns) a.push_back(Angle::exact(t));
        return PolygonConfig(std::move(a));
    }

    static PolygonConfig from_turns(std::initializer_list<Turn> turns) {
        return from_turns(std::span<const Turn>(turns.begin(), turns.size()));
    }

    static PolygonConfig from_radians(std::span<const double> radians) {
        std::vector<Angle> a;
        a.reserve(radians.size());
        for (double r : radians) a.push_back(Angle::radians(r));
        return PolygonConfig(std::move(a));
    }

    /// Regular n-gon at turns k/n, exact.
    static PolygonConfig regular(std::size_t n) {
        std::vector<Turn> t;
        for (std::size_t k = 0; k < n; ++k)
            t.emplace_back(static_cast<std::int64_t>(k), static_cast<std::int64_t>(n));
        return from_turns(t);
    }

    std::size_t size() const noexcept { return angles_.size(); }
    AngleMode mode() const noexcept { return mode_; }
    bool exact() const noexcept { return mode_ == AngleMode::exact; }
    const std::vector<Angle>& angles() const noexcept { return angles_; }
    const Angle& operator[](std::size_t i) const { return angles_[i]; }

    /// Cyclic gap from vertex i to vertex i+1 (the last wraps to the first + 1 turn).
    Turn gap_turn(std::size_t i) const {
        const Turn next = i + 1 < size() ? angles_[i + 1].turn() : angles_[0].turn() + Turn(1);
        return next - angles_[i].turn();
    }

    double gap_radians(std::size_t i) const {
        const double next = i + 1 < size() ? angles_[i + 1].radians() : angles_[0].radians() + two_pi;
        return next - angles_[i].radians();
    }

private:
    bool less(std::size_t a, std::size_t b) const {
        if (mode_ == AngleMode::exact) return angles_[a].turn() < angles_[b].turn();
        return angles_[a].radians() < angles_[b].radians();
    }

    std::vector<Angle> angles_;
    AngleMode mode_ = AngleMode::exact;
};

/// Dimensionless size parameter rho = kappa r^2.
struct Rho {
    double value = 0.0;

    /// Domain-checked construction: 0 < rho < 1 for kappa > 0 (the equator
    /// rho = 1 is excluded), rho < 0 for kappa < 0.
    static Rho checked(double value, const Curvature& c) {
        if (!std::isfinite(value)) throw DomainError("rho: must be finite");
        if (c.positive() && !(value > 0.0 && value < 1.0))
            throw DomainError("rho: must lie in (0, 1) for kappa > 0 (equator excluded)");
        if (!c.positive() && !(value < 0.0))
            throw DomainError("rho: must be negative for kappa < 0");
        return Rho{value};
    }
};

/// Open interval of rho used for sweeps and grids. The hyperbolic side is
/// unbounded, so it is truncated to (-2, 0).
inline std::pair<double, double> rho_domain(const Curvature& c) {
    return c.positive() ? std::pair{0.0, 1.0} : std::pair{-2.0, 0.0};
}

/// Cell midpoints of an n-point uniform partition of rho_domain(c).
inline std::vector<double> rho_grid(const Curvature& c, std::size_t n) {
    const auto [lo, hi] = rho_domain(c);
    std::vector<double> grid;
    grid.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        grid.push_back(lo + (static_cast<double>(k) + 0.5) * (hi - lo) / static_cast<double>(n));
    return grid;
}

class MassVector {
public:
    MassVector() = default;
    explicit MassVector(std::vector<double> masses) : masses_(std::move(masses)) {
        for (double m : masses_)
            if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("masses: every mass must be positive");
    }
    MassVector(std::initializer_list<double> masses) : MassVector(std::vector<double>(masses)) {}

    static MassVector equal(std::size_t n, double m = 1.0) { return MassVector(std::vector<double>(n, m)); }

    std::size_t size() const noexcept { return masses_.size(); }
    double operator[](std::size_t i) const { return masses_[i]; }
    const std::vector<double>& values() const noexcept { return masses_; }

private:
    std::vector<double> masses_;
};

// ---------------------------------------------------------------------------
// chords

inline double chord_c(const Angle& alpha_j, const Angle& alpha_i) {
    if (alpha_j.is_exact() && alpha_i.is_exact()) {
        if (alpha_j.turn() == alpha_i.turn()) throw DomainError("coincident vertices");
        return one_minus_cos_turn(alpha_j.turn() - alpha_i.turn());
    }
    if (alpha_j.radians() == alpha_i.radians()) throw DomainError("coincident vertices");
    const double h = std::sin(0.5 * (alpha_j.radians() - alpha_i.radians()));
    return 2.0 * h * h;
}

inline double chord_s(const Angle& alpha_j, const Angle& alpha_i) {
    if (alpha_j.is_exact() && alpha_i.is_exact()) {
        if (alpha_j.turn() == alpha_i.turn()) throw DomainError("coincident vertices");
        return sin_turn(alpha_j.turn() - alpha_i.turn());
    }
    if (alpha_j.radians() == alpha_i.radians()) throw DomainError("coincident vertices");
    return std::sin(alpha_j.radians() - alpha_i.radians());
}

namespace detail {

inline double kernel_base(double c, double rho) {
    if (!(c > 0.0 && c <= 2.0)) throw DomainError("chord value c must lie in (0, 2]");
    const double base = 2.0 - c * rho;
    if (!(base > 0.0)) throw DomainError("2 - c rho must be positive");
    return base;
}

}  // namespace detail

inline double mu(double c, Rho rho) {
    const double base = detail::kernel_base(c, rho.value);
    return 1.0 / (std::sqrt(c) * base * std::sqrt(base));
}

inline double nu(double c, double s, Rho rho) {
    const double base = detail::kernel_base(c, rho.value);
    return s / (c * std::sqrt(c) * base * std::sqrt(base));
}

struct DeltaGamma {
    std::vector<double> deltas;
    std::vector<double> gammas;
};

inline DeltaGamma delta_gamma(const PolygonConfig& cfg, const MassVector& m, Rho rho) {
    const std::size_t n = cfg.size();
    if (m.size() != n) throw DomainError("masses: expected one mass per vertex");
    DeltaGamma out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double c = chord_c(cfg[j], cfg[i]);
            const double s = chord_s(cfg[j], cfg[i]);
            out.deltas[i] += m[j] * mu(c, rho);
            out.gammas[i] += m[j] * nu(c, s, rho);
        }
    }
    return out;
}

struct CriterionReport {
    std::vector<double> deltas;
    std::vector<double> gammas;
    double max_delta_spread = 0.0;
    double max_gamma_spread = 0.0;
    double tolerance = 0.0;
    bool satisfied = false;
};

/// Satisfied iff max_i |delta_i - delta_1| and max_i |gamma_i - gamma_1| are
/// both at most tol (1 + |delta_1|).
inline CriterionReport criterion_check(const PolygonConfig& cfg, const MassVector& m, Rho rho, double tol) {
    auto dg = delta_gamma(cfg, m, rho);
    CriterionReport r;
    r.tolerance = tol;
    for (std::size_t i = 1; i < dg.deltas.size(); ++i) {
        r.max_delta_spread = std::max(r.max_delta_spread, std::abs(dg.deltas[i] - dg.deltas[0]));
        r.max_gamma_spread = std::max(r.max_gamma_spread, std::abs(dg.gammas[i] - dg.gammas[0]));
    }
    const double bound = tol * (1.0 + std::abs(dg.deltas[0]));
    r.satisfied = r.max_delta_spread <= bound && r.max_gamma_spread <= bound;
    r.deltas = std::move(dg.deltas);
    r.gammas = std::move(dg.gammas);
    return r;
}

// ---------------------------------------------------------------------------
// canonical labelling

struct CanonicalPolygon {
    PolygonConfig config;
    /// New vertex k is old vertex (k + shift) mod n.
    std::size_t shift = 0;
};

namespace detail {

inline constexpr double float_gap_tie = 1e-12;

inline std::vector<Angle> rotated(const PolygonConfig& cfg, std::size_t k) {
    const std::size_t n = cfg.size();
    std::vector<Angle> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = cfg[(k + i) % n];
        if (cfg.exact())
            out.push_back(Angle::exact(wrap_turn(a.turn() - cfg[k].turn())));
        else
            out.push_back(Angle::radians(i == 0 ? 0.0 : wrap_radians(a.radians() - cfg[k].radians())));
    }
    return out;
}

inline bool lex_less(const std::vector<Angle>& a, const std::vector<Angle>& b, bool exact) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (exact) {
            if (a[i].turn() != b[i].turn()) return a[i].turn() < b[i].turn();
        } else if (a[i].radians() != b[i].radians()) {
            return a[i].radians() < b[i].radians();
        }
    }
    return false;
}

}  // namespace detail

/// Rotates and relabels so that the first gap alpha_2 - alpha_1 is a minimal
/// cyclic gap and alpha_1 = 0. Among qualifying rotations the
/// lexicographically smallest angle tuple wins.
inline CanonicalPolygon canonicalize_with_shift(const PolygonConfig& cfg) {
    const std::size_t n = cfg.size();
    std::vector<std::size_t> candidates;
    if (cfg.exact()) {
        Turn best = cfg.gap_turn(0);
        for (std::size_t k = 1; k < n; ++k) best = std::min(best, cfg.gap_turn(k));
        for (std::size_t k = 0; k < n; ++k)
            if (cfg.gap_turn(k) == best) candidates.push_back(k);
    } else {
        double best = cfg.gap_radians(0);
        for (std::size_t k = 1; k < n; ++k) best = std::min(best, cfg.gap_radians(k));
        for (std::size_t k = 0; k < n; ++k)
            if (cfg.gap_radians(k) <= best + detail::float_gap_tie) candidates.push_back(k);
    }
    std::size_t best_k = candidates.front();
    auto best_angles = detail::rotated(cfg, best_k);
    for (std::size_t idx = 1; idx < candidates.size(); ++idx) {
        auto a = detail::rotated(cfg, candidates[idx]);
        if (detail::lex_less(a, best_angles, cfg.exact())) {
            best_angles = std::move(a);
            best_k = candidates[idx];
        }
    }
    return {PolygonConfig(std::move(best_angles)), best_k};
}

inline PolygonConfig canonicalize(const PolygonConfig& cfg) { return canonicalize_with_shift(cfg).config; }

inline bool is_canonical(const PolygonConfig& cfg) {
    const auto canon = canonicalize(cfg);
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        if (cfg.exact()) {
            if (canon[i].turn() != cfg[i].turn()) return false;
        } else if (canon[i].radians() != cfg[i].radians()) {
            return false;
        }
    }
    return true;
}

/// All cyclic gaps equal 1/n turn: exactly in exact mode, within tol radians otherwise.
inline bool is_regular(const PolygonConfig& cfg, double tol = 1e-9) {
    const std::size_t n = cfg.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (cfg.exact()) {
            if (cfg.gap_turn(i) != Turn(1, static_cast<std::int64_t>(n))) return false;
        } else if (std::abs(cfg.gap_radians(i) - two_pi / static_cast<double>(n)) > tol) {
            return false;
        }
    }
    return true;
}

}  // namespace curved_nbody
