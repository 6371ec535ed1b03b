/**
 * @file angles.hpp
 * @brief Angles stored either as exact rational fractions of a full turn or
 * as binary64 radians.
 *
 * Exact turns let the certificate code decide equalities such as
 * cos(a) == cos(b) without rounding. The trigonometric helpers reduce to the
 * first octant and return exact values at multiples of 1/12 and 1/8 turn,
 * so that e.g. cos(1/4 turn) is exactly 0 and sin(1/2 turn) exactly 0.
 */
#pragma once

#include "geometry.hpp"

#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace curved_nbody {

using Turn = boost::rational<std::int64_t>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduces t into [0, 1).
inline Turn wrap_turn(Turn t) {
    const auto n = t.numerator();
    const auto d = t.denominator();
    auto r = n % d;
    if (r < 0) r += d;
    return Turn(r, d);
}

/// Reduces x into [0, 2 pi).
inline double wrap_radians(double x) {
    double r = std::fmod(x, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

inline double turn_to_radians(const Turn& t) {
    return two_pi * boost::rational_cast<double>(t);
}

namespace detail {

inline constexpr double sqrt3_4 = 0.86602540378443859659;  // sqrt(3)/2
inline constexpr double sqrt1_2 = 0.70710678118654752440;  // sqrt(1/2)

/// sin over [0, 1/4] turn with exact special values.
inline double sin_first_quadrant(const Turn& t) {
    if (t == Turn(0)) return 0.0;
    if (t == Turn(1, 12)) return 0.5;
    if (t == Turn(1, 8)) return sqrt1_2;
    if (t == Turn(1, 6)) return sqrt3_4;
    if (t == Turn(1, 4)) return 1.0;
    if (t < Turn(1, 8)) return std::sin(turn_to_radians(t));
    return std::cos(turn_to_radians(Turn(1, 4) - t));
}

}  // namespace detail

inline double sin_turn(Turn t) {
    t = wrap_turn(t);
    const bool negate = t >= Turn(1, 2);
    if (negate) t -= Turn(1, 2);
    if (t > Turn(1, 4)) t = Turn(1, 2) - t;
    const double s = detail::sin_first_quadrant(t);
    return negate ? -s : s;
}

inline double cos_turn(const Turn& t) { return sin_turn(t + Turn(1, 4)); }

/// Representative of the class {t, -t} mod 1, in [0, 1/2].
/// Two differences have the same cosine iff their classes agree.
inline Turn cosine_class(const Turn& t) {
    const Turn w = wrap_turn(t);
    return w > Turn(1, 2) ? Turn(1) - w : w;
}

/// 1 - cos(t) evaluated so that equal cosine classes give identical doubles.
inline double one_minus_cos_turn(const Turn& t) {
    const Turn k = cosine_class(t);
    if (k <= Turn(1, 6)) {
        const double s = sin_turn(k / 2);
        return 2.0 * s * s;
    }
    return 1.0 - cos_turn(k);
}

/// Parses "p/q" (or an integer "p") into a reduced turn fraction.
inline std::optional<Turn> parse_turn(std::string_view text) {
    auto parse_int = [](std::string_view s) -> std::optional<std::int64_t> {
        if (s.empty()) return std::nullopt;
        std::size_t pos = 0;
        bool neg = false;
        if (s[0] == '-' || s[0] == '+') {
            neg = s[0] == '-';
            pos = 1;
        }
        if (pos == s.size()) return std::nullopt;
        std::int64_t v = 0;
        for (; pos < s.size(); ++pos) {
            const char ch = s[pos];
            if (ch < '0' || ch > '9') return std::nullopt;
            if (v > (INT64_MAX - (ch - '0')) / 10) return std::nullopt;
            v = v * 10 + (ch - '0');
        }
        return neg ? -v : v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        const auto p = parse_int(text);
        if (!p) return std::nullopt;
        return Turn(*p);
    }
    const auto p = parse_int(text.substr(0, slash));
    const auto q = parse_int(text.substr(slash + 1));
    if (!p || !q || *q == 0) return std::nullopt;
    return Turn(*p, *q);
}

inline std::string format_turn(const Turn& t) {
    if (t.denominator() == 1) return std::to_string(t.numerator());
    return std::to_string(t.numerator()) + "/" + std::to_string(t.denominator());
}

/// A vertex angle in [0, 2 pi). Exact angles carry their turn fraction.
class Angle {
public:
    static Angle exact(const Turn& t) {
        if (t < Turn(0) || t >= Turn(1))
            throw DomainError("exact angle must lie in [0, 1) turn, got " + format_turn(t));
        return Angle(t, turn_to_radians(t));
    }

    static Angle radians(double r) {
        if (!std::isfinite(r) || r < 0.0 || r >= two_pi)
            throw DomainError("angle must lie in [0, 2pi) radians");
        return Angle(std::nullopt, r);
    }

    bool is_exact() const noexcept { return turn_.has_value(); }

    const Turn& turn() const {
        if (!turn_) throw DomainError("angle has no exact representation");
        return *turn_;
    }

    double radians() const noexcept { return radians_; }

private:
    Angle(std::optional<Turn> t, double r) : turn_(std::move(t)), radians_(r) {}

    std::optional<Turn> turn_;
    double radians_;
};

}  // namespace curved_nbody
