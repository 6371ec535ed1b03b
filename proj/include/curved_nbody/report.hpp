/**
 * @file report.hpp
 * @brief Deterministic JSON and CSV rendering.
 *
 * JSON objects are written with sorted keys and floating values with 17
 * significant digits, so equal inputs give byte-identical output.
 */
#pragma once

#include "certificate.hpp"
#include "criterion.hpp"
#include "dynamics.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace curved_nbody {

using json = nlohmann::json;

inline std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void dump_canonical(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // std::map keeps keys sorted
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_canonical(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) out += ',';
                dump_canonical(j[k], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        default:
            out += j.dump();
    }
}

}  // namespace detail

inline std::string dump_canonical(const json& j) {
    std::string out;
    detail::dump_canonical(j, out);
    return out;
}

inline json angles_json(const std::vector<Angle>& angles) {
    json a = json::array();
    for (const auto& x : angles) {
        if (x.is_exact())
            a.push_back(format_turn(x.turn()));
        else
            a.push_back(x.radians());
    }
    return a;
}

inline json pattern_json(const std::vector<int>& p) {
    json o = json::object();
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] != 0) o["m" + std::to_string(k + 1)] = p[k];
    return o;
}

inline json to_json(const CriterionReport& r, double rho) {
    return {{"deltas", r.deltas},
            {"gammas", r.gammas},
            {"max_delta_spread", r.max_delta_spread},
            {"max_gamma_spread", r.max_gamma_spread},
            {"rho", rho},
            {"tol", r.tolerance},
            {"satisfied", r.satisfied}};
}

inline json to_json(const FeasibilityResult& f, double rho) {
    json o{{"feasible", f.feasible},
           {"verdict", f.feasible ? "feasible" : "infeasible"},
           {"residual", f.residual},
           {"rho", rho},
           {"masses", nullptr}};
    if (f.masses) o["masses"] = f.masses->values();
    return o;
}

inline json to_json(const Certificate& c) {
    json forms = json::array();
    for (const auto& w : c.witness_forms) {
        forms.push_back({{"equation", to_string(w.equation)},
                         {"factor", w.equation == Equation::delta ? "a_j1" : "a_j1*s_j1/c_j1"},
                         {"factor_sign", w.factor_sign},
                         {"coefficients", pattern_json(w.pattern)},
                         {"sign_definite", w.sign_definite}});
    }
    json o{{"n", c.canonical.size()},
           {"angles", angles_json(c.input_angles)},
           {"canonical_angles", angles_json(c.canonical.angles())},
           {"j", c.j},
           {"case", to_string(c.case_tag)},
           {"u", nullptr},
           {"v", nullptr},
           {"failing_equation", to_string(c.failing_equation)},
           {"witness_forms", forms},
           {"disjunction_sum", nullptr},
           {"feasibility", nullptr},
           {"narrative", c.narrative}};
    if (c.u) o["u"] = *c.u;
    if (c.v) o["v"] = *c.v;
    if (c.disjunction_sum) o["disjunction_sum"] = pattern_json(*c.disjunction_sum);
    if (c.feasibility)
        o["feasibility"] = {{"rho", c.feasibility->rho},
                            {"verdict", c.feasibility->result.feasible ? "feasible" : "infeasible"},
                            {"residual", c.feasibility->result.residual}};
    return o;
}

inline std::string csv_header(std::size_t bodies) {
    std::string h = "t";
    for (std::size_t i = 1; i <= bodies; ++i) {
        const auto k = std::to_string(i);
        h += ",x" + k + ",y" + k + ",z" + k + ",vx" + k + ",vy" + k + ",vz" + k;
    }
    return h + "\n";
}

inline std::string csv_row(double t, const BodySystem& s) {
    std::string row = format_double(t);
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (double x : {s.positions[i].x, s.positions[i].y, s.positions[i].z, s.velocities[i].x,
                         s.velocities[i].y, s.velocities[i].z}) {
            row += ',';
            row += format_double(x);
        }
    }
    return row + "\n";
}

}  // namespace curved_nbody
