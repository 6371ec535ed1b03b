/**
 * @file certificate.hpp
 * @brief Executable nonexistence certificates for irregular polygonal
 * homographic orbits with varying size.
 *
 * With rho varying, the two scalar conditions delta_1 = delta_2 and
 * gamma_1 = gamma_2 must hold identically in rho, hence all their
 * rho-derivatives vanish. The k-th derivative of mu is
 *   prod_{l<k} (3/2 + l) * c^{k-1/2} / (2 - c rho)^{3/2+k},
 * whose kernel factors as a(c, rho) g(c, rho)^k with g = c / (2 - c rho) and
 * a = mu(c, rho), so each difference equation
 * becomes a finite exponential sum in k. Exponentials with distinct bases are
 * linearly independent, so every coefficient grouped by base must vanish.
 *
 * Two independent routes decide whether positive masses can do that:
 *  - the case analysis (pairing_u / pairing_v / classify_case) picks a vertex
 *    j and exhibits a grouped coefficient that is sign-definite in the masses;
 *  - mass_feasibility groups every term generically and runs a linear
 *    feasibility search for a positive mass vector.
 * certify() emits a certificate only when both routes agree.
 *
 * Vertex labels in this header are 1-based, matching the usual statement of
 * the argument (vertex 1 and 2 span the minimal gap).
 */
#pragma once

#include "angles.hpp"
#include "criterion.hpp"
#include "lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace curved_nbody {

/// Nonexistence does not apply: the polygon is regular.
class RegularPolygonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two routes that must agree did not. Indicates a bug or corrupted input.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// derivative kernels

/// prod_{l=0}^{k-1} (3/2 + l); 1 for k = 0.
inline double derivative_prefactor(int k) {
    double p = 1.0;
    for (int l = 0; l < k; ++l) p *= 1.5 + l;
    return p;
}

/// k-th rho-derivative of mu(c, rho).
inline double mu_derivative(double c, Rho rho, int k) {
    if (k < 0) throw DomainError("derivative order must be nonnegative");
    if (k == 0) return mu(c, rho);
    const double base = detail::kernel_base(c, rho.value);
    return derivative_prefactor(k) * std::pow(c, k - 0.5) / std::pow(base, 1.5 + k);
}

struct Decomposition {
    double a = 0.0;
    double g = 0.0;
};

/// a = c^{-1/2} / (2 - c rho)^{3/2}, g = c / (2 - c rho), so that
/// a g^k = c^{k-1/2} / (2 - c rho)^{3/2+k} = mu_derivative(c, rho, k) / derivative_prefactor(k).
inline Decomposition decompose(double c, Rho rho) {
    const double base = detail::kernel_base(c, rho.value);
    return {1.0 / (std::sqrt(c) * base * std::sqrt(base)), c / base};
}

// ---------------------------------------------------------------------------
// base grouping

enum class Equation { delta, gamma };

inline const char* to_string(Equation e) { return e == Equation::delta ? "delta" : "gamma"; }

/// One summand of a difference equation: pattern . m times factor, multiplying g_ji^k.
struct Term {
    std::size_t j = 0;
    std::size_t i = 0;
    Equation equation = Equation::delta;
    std::vector<int> pattern;
    /// a_ji for delta terms, a_ji s_ji / c_ji for gamma terms
    double factor = 0.0;
};

struct BaseGroup {
    double c = 0.0;
    /// exact cosine class of the angle difference, in [0, 1/2] turn
    std::optional<Turn> c_class;
    double a = 0.0;
    double g = 0.0;
    std::vector<Term> members;
    std::vector<double> delta_form;
    std::vector<double> gamma_form;
    /// grouped integer pattern of the delta terms (every delta factor equals a)
    std::vector<int> delta_pattern;
};

struct CoefficientSystem {
    std::size_t n = 0;
    double rho = 0.0;
    std::vector<BaseGroup> groups;

    /// Group holding the term (j, i) of the given equation, or nullptr.
    const BaseGroup* group_of(std::size_t j, std::size_t i) const {
        for (const auto& g : groups)
            for (const auto& t : g.members)
                if (t.j == j && t.i == i) return &g;
        return nullptr;
    }
};

inline constexpr double float_group_tol = 1e-9;
inline constexpr double float_group_exact = 1e-12;

/// Enumerates every term of the difference equations delta_1 - delta_2 = 0
/// and gamma_1 - gamma_2 = 0 after k-fold differentiation, and groups terms
/// sharing a base g (equivalently a chord value c).
///
/// The (2,1) term enters delta with (m_2 - m_1) and gamma with
/// (m_1 + m_2) s_21/c_21; for j >= 3 the (j,1) term enters with +m_j and the
/// (j,2) term with -m_j, the gamma versions weighted by s/c.
inline CoefficientSystem base_groups(const PolygonConfig& cfg, Rho rho) {
    const std::size_t n = cfg.size();
    const bool exact = cfg.exact();

    struct Raw {
        Term term;
        double c;
        std::optional<Turn> cls;
    };
    std::vector<Raw> raw;
    auto add = [&](std::size_t j, std::size_t i, Equation eq, std::vector<int> pattern) {
        const auto& aj = cfg[j - 1];
        const auto& ai = cfg[i - 1];
        const double c = chord_c(aj, ai);
        const auto d = decompose(c, rho);
        double factor = d.a;
        if (eq == Equation::gamma) factor *= chord_s(aj, ai) / c;
        std::optional<Turn> cls;
        if (exact) cls = cosine_class(aj.turn() - ai.turn());
        raw.push_back({Term{j, i, eq, std::move(pattern), factor}, c, cls});
    };
    auto unit = [n](std::size_t idx, int v) {
        std::vector<int> p(n, 0);
        p[idx - 1] = v;
        return p;
    };

    {
        std::vector<int> d(n, 0), g(n, 0);
        d[1] = 1;
        d[0] = -1;
        g[0] = 1;
        g[1] = 1;
        add(2, 1, Equation::delta, d);
        add(2, 1, Equation::gamma, g);
    }
    for (std::size_t j = 3; j <= n; ++j) {
        add(j, 1, Equation::delta, unit(j, 1));
        add(j, 2, Equation::delta, unit(j, -1));
        add(j, 1, Equation::gamma, unit(j, 1));
        add(j, 2, Equation::gamma, unit(j, -1));
    }

    std::stable_sort(raw.begin(), raw.end(), [exact](const Raw& x, const Raw& y) {
        return exact ? *x.cls < *y.cls : x.c < y.c;
    });

    CoefficientSystem sys;
    sys.n = n;
    sys.rho = rho.value;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        bool same = false;
        if (k > 0) {
            if (exact) {
                same = *raw[k].cls == *raw[k - 1].cls;
            } else {
                const double diff = raw[k].c - raw[k - 1].c;
                if (diff > float_group_exact && diff < float_group_tol)
                    throw DomainError("chord values too close to group unambiguously; use exact angles");
                same = diff <= float_group_exact;
            }
        }
        if (!same) {
            BaseGroup g;
            g.c = raw[k].c;
            g.c_class = raw[k].cls;
            const auto d = decompose(raw[k].c, rho);
            g.a = d.a;
            g.g = d.g;
            g.delta_form.assign(n, 0.0);
            g.gamma_form.assign(n, 0.0);
            g.delta_pattern.assign(n, 0);
            sys.groups.push_back(std::move(g));
        }
        auto& g = sys.groups.back();
        const auto& t = raw[k].term;
        auto& form = t.equation == Equation::delta ? g.delta_form : g.gamma_form;
        for (std::size_t m = 0; m < n; ++m) {
            form[m] += t.pattern[m] * t.factor;
            if (t.equation == Equation::delta) g.delta_pattern[m] += t.pattern[m];
        }
        g.members.push_back(t);
    }

    for (std::size_t k = 1; k < sys.groups.size(); ++k)
        if (!(sys.groups[k].g > sys.groups[k - 1].g))
            throw ConsistencyError("base map c -> g is not strictly increasing");
    return sys;
}

// ---------------------------------------------------------------------------
// pairings (exact mode, canonical input)

namespace detail {

inline void require_exact(const PolygonConfig& cfg) {
    if (!cfg.exact()) throw DomainError("angles: exact rational turns are required");
}

inline void require_label(const PolygonConfig& cfg, std::size_t j) {
    if (j < 1 || j > cfg.size()) throw DomainError("vertex label out of range");
}

/// Label of the vertex at angle t (mod 1 turn), if any.
inline std::optional<std::size_t> vertex_at(const PolygonConfig& cfg, const Turn& t) {
    const Turn w = wrap_turn(t);
    for (std::size_t k = 0; k < cfg.size(); ++k)
        if (cfg[k].turn() == w) return k + 1;
    return std::nullopt;
}

inline const Turn& alpha(const PolygonConfig& cfg, std::size_t label) { return cfg[label - 1].turn(); }

}  // namespace detail

/// u with alpha_j - alpha_1 = alpha_2 - alpha_u (mod 1 turn): c_j1 = c_u2 through
/// the reflected branch. Unique when it exists.
inline std::optional<std::size_t> pairing_u(const PolygonConfig& cfg, std::size_t j) {
    detail::require_exact(cfg);
    detail::require_label(cfg, j);
    using detail::alpha;
    return detail::vertex_at(cfg, alpha(cfg, 1) + alpha(cfg, 2) - alpha(cfg, j));
}

/// u with alpha_u = alpha_j + (alpha_2 - alpha_1) (mod 1 turn). On a canonical
/// polygon the minimal-gap ordering forces u = j + 1 (cyclically) and the gap
/// after j to equal the first gap; anything else throws ConsistencyError.
inline std::optional<std::size_t> pairing_possibility1(const PolygonConfig& cfg, std::size_t j) {
    detail::require_exact(cfg);
    detail::require_label(cfg, j);
    using detail::alpha;
    const Turn first_gap = alpha(cfg, 2) - alpha(cfg, 1);
    const auto u = detail::vertex_at(cfg, alpha(cfg, j) + first_gap);
    if (!u) return std::nullopt;
    const std::size_t next = j == cfg.size() ? 1 : j + 1;
    if (*u != next || cfg.gap_turn(j - 1) != first_gap)
        throw ConsistencyError("possibility-1 partner is not the next vertex; polygon is not canonical");
    return u;
}

/// v != j with alpha_j + alpha_v = 2 alpha_1 (mod 1 turn): c_j1 = c_v1.
inline std::optional<std::size_t> pairing_v(const PolygonConfig& cfg, std::size_t j) {
    detail::require_exact(cfg);
    detail::require_label(cfg, j);
    using detail::alpha;
    const auto v = detail::vertex_at(cfg, 2 * alpha(cfg, 1) - alpha(cfg, j));
    if (v && *v == j) return std::nullopt;
    return v;
}

/// Smallest j in 3..n whose gap to the next vertex differs from the first gap.
inline std::size_t find_contradiction_j(const PolygonConfig& cfg) {
    detail::require_exact(cfg);
    if (!is_canonical(cfg)) throw DomainError("angles: polygon must be canonicalized first");
    if (is_regular(cfg)) throw RegularPolygonError("polygon is regular; nonexistence does not apply");
    for (std::size_t j = 3; j <= cfg.size(); ++j)
        if (!pairing_possibility1(cfg, j)) return j;
    throw ConsistencyError("irregular canonical polygon without a possibility-1 failure");
}

// ---------------------------------------------------------------------------
// certificates

enum class CaseTag { case1, case2u, case2v, case3 };

inline const char* to_string(CaseTag c) {
    switch (c) {
        case CaseTag::case1: return "case1";
        case CaseTag::case2u: return "case2u";
        case CaseTag::case2v: return "case2v";
        case CaseTag::case3: return "case3";
    }
    return "?";
}

enum class FailingEquation { delta, gamma, either };

inline const char* to_string(FailingEquation f) {
    switch (f) {
        case FailingEquation::delta: return "delta";
        case FailingEquation::gamma: return "gamma";
        case FailingEquation::either: return "either";
    }
    return "?";
}

/// Coefficient of g_j1^k in one equation, as factor * (pattern . m). The delta
/// factor is a_j1 > 0; the gamma factor is a_j1 s_j1 / c_j1.
struct WitnessForm {
    Equation equation = Equation::delta;
    std::vector<int> pattern;
    /// sign of the scalar factor in front of the pattern (+1, -1, or 0)
    int factor_sign = 1;
    bool sign_definite = false;
};

struct FeasibilityResult {
    bool feasible = false;
    std::optional<MassVector> masses;
    double residual = 0.0;
};

struct FeasibilityCheck {
    double rho = 0.0;
    FeasibilityResult result;
};

struct Certificate {
    std::vector<Angle> input_angles;
    PolygonConfig canonical;
    std::size_t j = 0;
    CaseTag case_tag = CaseTag::case1;
    std::optional<std::size_t> u;
    std::optional<std::size_t> v;
    FailingEquation failing_equation = FailingEquation::delta;
    std::vector<WitnessForm> witness_forms;
    /// case-3 disjunction: delta pattern + gamma pattern (both cannot vanish)
    std::optional<std::vector<int>> disjunction_sum;
    std::optional<FeasibilityCheck> feasibility;
    std::string narrative;
};

namespace detail {

/// Nonzero and all nonzero entries share one sign.
inline bool sign_definite(const std::vector<int>& p) {
    bool pos = false;
    bool neg = false;
    for (int x : p) {
        pos |= x > 0;
        neg |= x < 0;
    }
    return pos != neg;
}

inline std::string pattern_text(const std::vector<int>& p) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0) continue;
        const int a = std::abs(p[k]);
        if (first)
            os << (p[k] < 0 ? "-" : "");
        else
            os << (p[k] < 0 ? " - " : " + ");
        if (a != 1) os << a;
        os << "m" << k + 1;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

inline std::string angles_text(const PolygonConfig& cfg) {
    std::ostringstream os;
    os << "(";
    for (std::size_t k = 0; k < cfg.size(); ++k) os << (k ? ", " : "") << format_turn(cfg[k].turn());
    os << ")";
    return os.str();
}

}  // namespace detail

/// Case analysis at vertex j of a canonical exact polygon.
///
/// Grouped with g_j1 can be (u,2) from the reflected pairing (item II:
/// s_u2 = -s_j1) and (v,1) from the mirror pairing about alpha_1 (item I:
/// s_v1 = -s_j1); item III gives all of them the same a. Possibility 1 fails
/// at j by choice, and the (2,1) term cannot share the base because that
/// would need the last gap to equal the first.
inline Certificate classify_case(const PolygonConfig& cfg, std::size_t j) {
    detail::require_exact(cfg);
    detail::require_label(cfg, j);
    if (j < 3) throw DomainError("special vertex must satisfy j >= 3");
    if (pairing_possibility1(cfg, j)) throw DomainError("possibility 1 holds at j; not a contradiction vertex");

    const std::size_t n = cfg.size();
    Certificate cert{{}, cfg, j, CaseTag::case1, pairing_u(cfg, j), pairing_v(cfg, j), FailingEquation::delta,
                     {}, std::nullopt, std::nullopt, {}};
    const auto& u = cert.u;
    const auto& v = cert.v;
    cert.case_tag = u && v ? CaseTag::case3 : u ? CaseTag::case2u : v ? CaseTag::case2v : CaseTag::case1;

    const Turn diff = detail::alpha(cfg, j) - detail::alpha(cfg, 1);
    const double s = sin_turn(diff);
    const int s_sign = (s > 0.0) - (s < 0.0);
    const bool antipodal = wrap_turn(diff) == Turn(1, 2);
    if (u && antipodal)
        throw ConsistencyError("s_j1 = 0 with a reflected partner; possibility 1 would hold");

    std::vector<int> dp(n, 0), gp(n, 0);
    dp[j - 1] += 1;
    gp[j - 1] += 1;
    if (v) {
        dp[*v - 1] += 1;
        gp[*v - 1] -= 1;
    }
    if (u) {
        dp[*u - 1] -= 1;
        gp[*u - 1] += 1;
    }

    WitnessForm wd{Equation::delta, dp, 1, detail::sign_definite(dp)};
    WitnessForm wg{Equation::gamma, gp, antipodal ? 0 : s_sign, !antipodal && detail::sign_definite(gp)};
    cert.witness_forms = {wd, wg};
    if (wd.sign_definite)
        cert.failing_equation = FailingEquation::delta;
    else if (wg.sign_definite)
        cert.failing_equation = FailingEquation::gamma;
    else {
        std::vector<int> sum(n, 0);
        for (std::size_t k = 0; k < n; ++k) sum[k] = dp[k] + gp[k];
        if (antipodal || !detail::sign_definite(sum))
            throw ConsistencyError("no sign-definite coefficient of g_j1 in either equation");
        cert.failing_equation = FailingEquation::either;
        cert.disjunction_sum = std::move(sum);
    }
    return cert;
}

/// Searches for masses m >= floor making every grouped coefficient vanish.
///
/// Since the bases g are distinct and positive, a sum of coefficient * g^k
/// vanishes for all k >= 0 iff each coefficient does; feasibility of the
/// homogeneous system {forms = 0, m >= floor} is solved by phase-I simplex on
/// m = s (1 + y), y >= 0, s = max(floor, 1).
inline FeasibilityResult mass_feasibility(const PolygonConfig& cfg, Rho rho, double floor = 1e-9) {
    if (!(floor > 0.0)) throw DomainError("floor: must be positive");
    const auto sys = base_groups(cfg, rho);
    const std::size_t n = sys.n;

    lp::Matrix rows;
    for (const auto& g : sys.groups) {
        for (const auto* form : {&g.delta_form, &g.gamma_form}) {
            double mx = 0.0;
            for (double x : *form) mx = std::max(mx, std::abs(x));
            double scale = g.a;
            for (const auto& t : g.members) scale = std::max(scale, std::abs(t.factor));
            if (mx <= 1e-12 * scale) continue;
            std::vector<double> row(n);
            for (std::size_t k = 0; k < n; ++k) row[k] = (*form)[k] / mx;
            rows.push_back(std::move(row));
        }
    }

    FeasibilityResult out;
    std::vector<double> m(n, 1.0);
    if (!rows.empty()) {
        std::vector<double> b(rows.size(), 0.0);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t k = 0; k < n; ++k) b[r] -= rows[r][k];
        const auto lp_out = lp::find_nonnegative_solution(rows, b, 1e-10);
        if (!lp_out.feasible) {
            out.feasible = false;
            out.residual = lp_out.infeasibility;
            return out;
        }
        for (std::size_t k = 0; k < n; ++k) m[k] += lp_out.x[k];
    }
    const double s = std::max(floor, 1.0);
    for (double& x : m) x *= s;

    double mmax = 0.0;
    for (double x : m) mmax = std::max(mmax, x);
    double res = 0.0;
    for (const auto& row : rows) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += row[k] * m[k];
        res = std::max(res, std::abs(acc) / mmax);
    }
    out.residual = res;
    out.feasible = res <= 1e-10;
    if (out.feasible) out.masses = MassVector(m);
    return out;
}

/// Interior rho used for the embedded cross-check.
inline double default_certificate_rho(bool kappa_positive) { return kappa_positive ? 0.5 : -1.0; }

namespace detail {

/// The grouped coefficient of g_j1 found generically must equal the case
/// analysis forms scaled by a_j1 and a_j1 s_j1/c_j1.
inline void check_against_groups(const Certificate& cert, Rho rho) {
    const auto sys = base_groups(cert.canonical, rho);
    const auto* g = sys.group_of(cert.j, 1);
    if (!g) throw ConsistencyError("term (j,1) missing from the base groups");
    const double c = chord_c(cert.canonical[cert.j - 1], cert.canonical[0]);
    const double sc = chord_s(cert.canonical[cert.j - 1], cert.canonical[0]) / c;
    const auto& wd = cert.witness_forms[0];
    const auto& wg = cert.witness_forms[1];
    for (std::size_t k = 0; k < sys.n; ++k) {
        if (g->delta_pattern[k] != wd.pattern[k])
            throw ConsistencyError("delta coefficient of g_j1 disagrees with the case analysis");
        const double expect = g->a * sc * wg.pattern[k];
        if (std::abs(g->gamma_form[k] - expect) > 1e-9 * g->a * std::max(1.0, std::abs(sc)))
            throw ConsistencyError("gamma coefficient of g_j1 disagrees with the case analysis");
    }
}

inline std::string narrative(const Certificate& cert, std::size_t shift, const Turn& first_gap) {
    const auto& cfg = cert.canonical;
    const std::size_t j = cert.j;
    std::ostringstream os;
    os << "Canonical labelling: start at input vertex " << shift + 1 << "; angles " << angles_text(cfg)
       << " turn, minimal gap alpha_2 - alpha_1 = " << format_turn(first_gap) << ".\n";
    os << "Terms of delta_1 - delta_2 and gamma_1 - gamma_2 after k rho-derivatives are a_ji g_ji^k "
          "with g_ji = c_ji/(2 - c_ji rho); distinct c give distinct bases, so each grouped "
          "coefficient must vanish.\n";
    os << "Sign convention: the (2,1) term of the delta difference carries (m2 - m1).\n";
    os << "Irregular polygon: not every gap equals the first gap, so some vertex has no partner "
          "alpha_u = alpha_j + (alpha_2 - alpha_1).\n";
    os << "Special vertex j = " << j << ": gap to the next vertex is " << format_turn(cfg.gap_turn(j - 1))
       << " != " << format_turn(first_gap) << ".\n";
    if (cert.v)
        os << "Mirror partner: v = " << *cert.v << " with c_" << j << "1 = c_" << *cert.v << "1 and s_" << *cert.v
           << "1 = -s_" << j << "1.\n";
    else
        os << "Mirror partner: no v with c_" << j << "1 = c_v1.\n";
    if (cert.u)
        os << "Reflected partner: u = " << *cert.u << " with alpha_" << j << " - alpha_1 = alpha_2 - alpha_" << *cert.u
           << " and s_" << *cert.u << "2 = -s_" << j << "1.\n";
    else
        os << "Reflected partner: no u with alpha_" << j << " - alpha_1 = alpha_2 - alpha_u.\n";
    os << "Grouped coefficients: equal c implies equal a, so the grouped coefficients are a_" << j << "1 times:\n";
    os << "  delta: " << pattern_text(cert.witness_forms[0].pattern) << "\n";
    os << "  gamma: (s_" << j << "1/c_" << j << "1) (" << pattern_text(cert.witness_forms[1].pattern) << ")\n";
    os << to_string(cert.case_tag) << ": ";
    switch (cert.failing_equation) {
        case FailingEquation::delta:
            os << "the delta coefficient is sign-definite and nonzero for positive masses.\n";
            break;
        case FailingEquation::gamma:
            os << "s_" << j << "1 != 0 and the gamma coefficient is sign-definite for positive masses.\n";
            break;
        case FailingEquation::either:
            os << "the two patterns add to " << pattern_text(*cert.disjunction_sum)
               << ", so they cannot both vanish for positive masses.\n";
            break;
    }
    if (cert.feasibility)
        os << "Cross-check at rho = " << cert.feasibility->rho << ": no positive masses solve the grouped system.\n";
    os << "Scope: applies to orbits with non-constant z; rigidly rotating (constant z) polygons are not covered.\n";
    return os.str();
}

}  // namespace detail

/// Canonicalize, pick j, classify, and cross-check against mass_feasibility.
inline Certificate certify(const PolygonConfig& cfg, bool kappa_positive = true) {
    detail::require_exact(cfg);
    const auto canon = canonicalize_with_shift(cfg);
    const std::size_t j = find_contradiction_j(canon.config);
    Certificate cert = classify_case(canon.config, j);
    cert.input_angles = cfg.angles();

    const Rho rho{default_certificate_rho(kappa_positive)};
    detail::check_against_groups(cert, rho);
    auto feas = mass_feasibility(canon.config, rho);
    if (feas.feasible) throw ConsistencyError("case analysis certifies nonexistence but masses were found");
    cert.feasibility = FeasibilityCheck{rho.value, std::move(feas)};
    cert.narrative = detail::narrative(cert, canon.shift, canon.config.gap_turn(0));
    return cert;
}

}  // namespace curved_nbody
