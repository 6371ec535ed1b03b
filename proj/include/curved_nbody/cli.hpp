/**
 * @file cli.hpp
 * @brief The curved-nbody command line: config loading and the subcommands
 * validate, criterion, certify, feasibility, simulate and sweep.
 *
 * Exit codes: 0 success / positive verdict, 1 negative verdict, 2 invalid
 * input or domain error, 3 regular polygon (certify), 4 drift-guard abort.
 */
#pragma once

#include "certificate.hpp"
#include "criterion.hpp"
#include "dynamics.hpp"
#include "parallel.hpp"
#include "report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace curved_nbody::cli {

enum ExitCode : int { exit_ok = 0, exit_negative = 1, exit_invalid = 2, exit_regular = 3, exit_drift = 4 };

/// Invalid configuration; names the offending field.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, const std::string& message)
        : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct InitialBody {
    Vec3 position;
    Vec3 velocity;
};

struct RunConfig {
    Curvature curvature{1.0};
    std::optional<PolygonConfig> polygon;
    std::optional<MassVector> masses;
    std::optional<double> rho;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<double> max_constraint_drift;
    std::optional<double> omega_dot;
    std::vector<InitialBody> bodies;
    double tol = 1e-10;
    std::uint64_t seed = 0;
};

namespace detail {

inline double number_field(const json& j, const std::string& field) {
    if (!j.is_number()) throw ParseError(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(field, "expected a finite number");
    return v;
}

inline Vec3 vec_field(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) throw ParseError(field, "expected [x, y, z]");
    return {number_field(j[0], field), number_field(j[1], field), number_field(j[2], field)};
}

template <class Fn>
auto with_field(const std::string& field, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(field, e.what());
    }
}

}  // namespace detail

inline RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ParseError("<root>", "expected a JSON object");
    static const std::vector<std::string> known{"kappa", "angles", "masses", "rho", "integrator", "tol",
                                                "seed",  "omega_dot", "bodies"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ParseError(it.key(), "unknown field");

    RunConfig cfg;
    if (!doc.contains("kappa")) throw ParseError("kappa", "required");
    cfg.curvature = detail::with_field("kappa", [&] { return Curvature(detail::number_field(doc["kappa"], "kappa")); });

    if (doc.contains("angles")) {
        const auto& a = doc["angles"];
        if (!a.is_array()) throw ParseError("angles", "expected an array");
        cfg.polygon = detail::with_field("angles", [&] {
            std::vector<Angle> angles;
            for (const auto& x : a) {
                if (x.is_string()) {
                    const auto t = parse_turn(x.get<std::string>());
                    if (!t) throw ParseError("angles", "cannot parse turn fraction '" + x.get<std::string>() + "'");
                    angles.push_back(Angle::exact(*t));
                } else if (x.is_number()) {
                    angles.push_back(Angle::radians(detail::number_field(x, "angles")));
                } else {
                    throw ParseError("angles", "expected \"p/q\" strings or radian numbers");
                }
            }
            return PolygonConfig(std::move(angles));
        });
    }

    if (doc.contains("masses")) {
        const auto& m = doc["masses"];
        if (!m.is_array()) throw ParseError("masses", "expected an array");
        cfg.masses = detail::with_field("masses", [&] {
            std::vector<double> v;
            for (const auto& x : m) v.push_back(detail::number_field(x, "masses"));
            return MassVector(std::move(v));
        });
        if (cfg.polygon && cfg.masses->size() != cfg.polygon->size())
            throw ParseError("masses", "expected one mass per angle");
    }

    if (doc.contains("rho")) {
        cfg.rho = detail::with_field("rho", [&] {
            return Rho::checked(detail::number_field(doc["rho"], "rho"), cfg.curvature).value;
        });
    }

    if (doc.contains("integrator")) {
        const auto& in = doc["integrator"];
        if (!in.is_object()) throw ParseError("integrator", "expected an object");
        for (auto it = in.begin(); it != in.end(); ++it) {
            const std::string field = "integrator." + it.key();
            const double v = detail::number_field(it.value(), field);
            if (it.key() == "dt") {
                if (!(v > 0.0)) throw ParseError(field, "must be positive");
                cfg.dt = v;
            } else if (it.key() == "t_end") {
                if (!(v >= 0.0)) throw ParseError(field, "must be nonnegative");
                cfg.t_end = v;
            } else if (it.key() == "max_constraint_drift") {
                if (!(v > 0.0)) throw ParseError(field, "must be positive");
                cfg.max_constraint_drift = v;
            } else {
                throw ParseError(field, "unknown field");
            }
        }
    }

    if (doc.contains("tol")) {
        cfg.tol = detail::number_field(doc["tol"], "tol");
        if (!(cfg.tol >= 0.0)) throw ParseError("tol", "must be nonnegative");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0)
            throw ParseError("seed", "expected a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("omega_dot")) cfg.omega_dot = detail::number_field(doc["omega_dot"], "omega_dot");

    if (doc.contains("bodies")) {
        const auto& b = doc["bodies"];
        if (!b.is_array() || b.empty()) throw ParseError("bodies", "expected a nonempty array");
        for (const auto& x : b) {
            if (!x.is_object() || !x.contains("q") || !x.contains("v"))
                throw ParseError("bodies", "each body needs \"q\" and \"v\"");
            cfg.bodies.push_back({detail::vec_field(x["q"], "bodies.q"), detail::vec_field(x["v"], "bodies.v")});
        }
        if (cfg.masses && cfg.masses->size() != cfg.bodies.size())
            throw ParseError("masses", "expected one mass per body");
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("--config", "cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("<root>", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

/// Writes to path.tmp and renames on success, so errors never leave partial files.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
        if (!out.flush()) throw std::runtime_error("cannot write '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

namespace detail {

inline const PolygonConfig& need_polygon(const RunConfig& cfg) {
    if (!cfg.polygon) throw ParseError("angles", "required for this command");
    return *cfg.polygon;
}

inline const MassVector& need_masses(const RunConfig& cfg) {
    if (!cfg.masses) throw ParseError("masses", "required for this command");
    return *cfg.masses;
}

inline Rho pick_rho(const RunConfig& cfg, std::optional<double> flag) {
    if (flag) return detail::with_field("--rho", [&] { return Rho::checked(*flag, cfg.curvature); });
    if (cfg.rho) return Rho{*cfg.rho};
    throw ParseError("rho", "required for this command");
}

}  // namespace detail

inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    json o{{"kappa", cfg.curvature.kappa()}, {"sigma", cfg.curvature.sigma()}, {"tol", cfg.tol}, {"seed", cfg.seed}};
    if (cfg.polygon) {
        const auto& p = *cfg.polygon;
        const auto canon = canonicalize_with_shift(p);
        json gaps = json::array();
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p.exact())
                gaps.push_back(format_turn(p.gap_turn(k)));
            else
                gaps.push_back(p.gap_radians(k));
        }
        json chords = json::array();
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = i + 1; j < p.size(); ++j)
                chords.push_back({{"i", i + 1}, {"j", j + 1}, {"c", chord_c(p[j], p[i])}, {"s", chord_s(p[j], p[i])}});
        o["n"] = p.size();
        o["mode"] = p.exact() ? "exact" : "float";
        o["angles"] = angles_json(p.angles());
        o["canonical_angles"] = angles_json(canon.config.angles());
        o["canonical_shift"] = canon.shift;
        o["gaps"] = gaps;
        o["chords"] = chords;
        o["is_regular"] = is_regular(p);
    }
    if (cfg.masses) o["masses"] = cfg.masses->values();
    if (cfg.rho) o["rho"] = *cfg.rho;
    if (!cfg.bodies.empty()) o["bodies"] = cfg.bodies.size();
    out << dump_canonical(o) << "\n";
    return exit_ok;
}

inline int cmd_criterion(const RunConfig& cfg, std::optional<double> rho_flag, std::optional<double> tol_flag,
                         std::ostream& out) {
    const auto& p = detail::need_polygon(cfg);
    const auto& m = detail::need_masses(cfg);
    const Rho rho = detail::pick_rho(cfg, rho_flag);
    const double tol = tol_flag.value_or(cfg.tol);
    const auto report = criterion_check(p, m, rho, tol);
    out << dump_canonical(to_json(report, rho.value)) << "\n";
    return report.satisfied ? exit_ok : exit_negative;
}

inline int cmd_certify(const RunConfig& cfg, bool text, std::ostream& out) {
    const auto& p = detail::need_polygon(cfg);
    if (!p.exact()) throw ParseError("angles", "certification requires exact \"p/q\" turn fractions");
    try {
        const auto cert = certify(p, cfg.curvature.positive());
        if (text)
            out << cert.narrative;
        else
            out << dump_canonical(to_json(cert)) << "\n";
        return exit_ok;
    } catch (const RegularPolygonError& e) {
        json o{{"n", p.size()}, {"angles", angles_json(p.angles())}, {"regular", true}, {"message", e.what()}};
        out << dump_canonical(o) << "\n";
        return exit_regular;
    }
}

inline int cmd_feasibility(const RunConfig& cfg, std::optional<double> rho_flag, std::ostream& out) {
    const auto& p = detail::need_polygon(cfg);
    if (!p.exact()) throw ParseError("angles", "feasibility requires exact \"p/q\" turn fractions");
    Rho rho{default_certificate_rho(cfg.curvature.positive())};
    if (rho_flag || cfg.rho) rho = detail::pick_rho(cfg, rho_flag);
    const auto canon = canonicalize(p);
    const auto result = mass_feasibility(canon, rho);
    json o = to_json(result, rho.value);
    o["groups"] = base_groups(canon, rho).groups.size();
    out << dump_canonical(o) << "\n";
    return result.feasible ? exit_ok : exit_negative;
}

struct SimulateOptions {
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::string> out_path;
};

/// Initial state from explicit bodies, or from the polygon at radius
/// sqrt(rho / kappa) rotating at omega_dot (given, or solved for).
inline std::pair<BodySystem, std::optional<double>> initial_state(const RunConfig& cfg) {
    const auto& m = detail::need_masses(cfg);
    if (!cfg.bodies.empty()) {
        BodySystem sys{cfg.curvature, m.values(), {}, {}};
        for (const auto& b : cfg.bodies) {
            sys.positions.push_back(b.position);
            sys.velocities.push_back(b.velocity);
        }
        detail::with_field("bodies", [&] {
            sys.check();
            return 0;
        });
        return {sys, std::nullopt};
    }
    const auto& p = detail::need_polygon(cfg);
    if (!cfg.rho) throw ParseError("rho", "required to place the polygon");
    const double r = std::sqrt(*cfg.rho / cfg.curvature.kappa());
    const double w = cfg.omega_dot ? *cfg.omega_dot : solve_omega(p, m, r, cfg.curvature);
    const auto req = RelativeEquilibrium::make(p, r, w, cfg.curvature);
    return {build_polygon_state(req, m, cfg.curvature), w};
}

inline int cmd_simulate(const RunConfig& cfg, const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    auto [sys, omega] = initial_state(cfg);
    IntegratorConfig ic;
    ic.dt = opt.dt.value_or(cfg.dt.value_or(1e-3));
    ic.t_end = opt.t_end.value_or(cfg.t_end.value_or(1.0));
    ic.max_constraint_drift = cfg.max_constraint_drift.value_or(1e-8);
    if (!(ic.dt > 0.0)) throw ParseError("--dt", "must be positive");
    if (!(ic.t_end >= 0.0)) throw ParseError("--t-end", "must be nonnegative");

    const auto c0 = azimuth_chords(sys);
    Diagnostics worst;
    double max_c_drift = 0.0;
    std::string csv;
    if (opt.out_path) csv = csv_header(sys.size());

    Trajectory traj;
    try {
        traj = integrate(sys, ic, [&](double t, const BodySystem& s, const Diagnostics& d) {
            worst.max_surface_residual = std::max(worst.max_surface_residual, d.max_surface_residual);
            worst.max_tangency_residual = std::max(worst.max_tangency_residual, d.max_tangency_residual);
            worst.min_pair_denominator = std::min(worst.min_pair_denominator, d.min_pair_denominator);
            const auto c = azimuth_chords(s);
            for (std::size_t k = 0; k < c.size(); ++k) max_c_drift = std::max(max_c_drift, std::abs(c[k] - c0[k]));
            if (opt.out_path) csv += csv_row(t, s);
        });
    } catch (const IntegrationAborted& e) {
        json o{{"error", e.what()}, {"time", e.time()}};
        out << dump_canonical(o) << "\n";
        err << "simulate: " << e.what() << " at t = " << format_double(e.time()) << "\n";
        return e.reason() == IntegrationAborted::Reason::drift ? exit_drift : exit_invalid;
    }
    if (opt.out_path) write_file_atomic(*opt.out_path, csv);

    const auto& last = traj.samples.back().state;
    double displacement = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i)
        displacement = std::max(displacement, (last.positions[i] - sys.positions[i]).norm());
    json o{{"bodies", sys.size()},
           {"dt", ic.dt},
           {"t_end", ic.t_end},
           {"steps", traj.samples.size() - 1},
           {"max_surface_residual", worst.max_surface_residual},
           {"max_tangency_residual", worst.max_tangency_residual},
           {"min_pair_denominator", worst.min_pair_denominator},
           {"max_c_drift", max_c_drift},
           {"final_displacement", displacement},
           {"omega_dot", nullptr}};
    if (omega) o["omega_dot"] = *omega;
    out << dump_canonical(o) << "\n";
    return exit_ok;
}

inline int cmd_sweep(const RunConfig& cfg, std::size_t grid_points, const std::optional<std::string>& out_path,
                     std::ostream& out) {
    const auto& p = detail::need_polygon(cfg);
    const auto& m = detail::need_masses(cfg);
    if (grid_points == 0) throw ParseError("--rho-grid", "must be at least 1");
    const auto grid = rho_grid(cfg.curvature, grid_points);
    const auto rows = parallel_map<std::string>(grid.size(), [&](std::size_t k) {
        const auto r = criterion_check(p, m, Rho{grid[k]}, cfg.tol);
        return format_double(grid[k]) + "," + format_double(r.max_delta_spread) + "," +
               format_double(r.max_gamma_spread) + "\n";
    });
    std::string csv = "rho,delta_spread,gamma_spread\n";
    for (const auto& r : rows) csv += r;
    if (out_path)
        write_file_atomic(*out_path, csv);
    else
        out << csv;
    return exit_ok;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Curved n-body toolkit: criterion evaluation, nonexistence certificates, simulation",
                 "curved-nbody"};
    app.require_subcommand(1);
    std::string config_path;
    auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config_path, "JSON config")->required(); };

    auto* validate = app.add_subcommand("validate", "Parse and echo a configuration with derived quantities");
    add_config(validate);

    std::optional<double> rho_flag, tol_flag;
    auto* criterion = app.add_subcommand("criterion", "Evaluate the delta/gamma criterion");
    add_config(criterion);
    criterion->add_option("--rho", rho_flag, "rho = kappa r^2");
    criterion->add_option("--tol", tol_flag, "relative tolerance");

    bool text = false;
    auto* cert = app.add_subcommand("certify", "Emit a nonexistence certificate for an irregular polygon");
    add_config(cert);
    cert->add_flag("--text", text, "print the narrative instead of JSON");

    auto* feas = app.add_subcommand("feasibility", "Search for positive masses solving the grouped system");
    add_config(feas);
    feas->add_option("--rho", rho_flag, "rho = kappa r^2");

    SimulateOptions sim_opt;
    auto* sim = app.add_subcommand("simulate", "Integrate the equations of motion");
    add_config(sim);
    sim->add_option("--dt", sim_opt.dt, "time step");
    sim->add_option("--t-end", sim_opt.t_end, "final time");
    sim->add_option("--out", sim_opt.out_path, "trajectory CSV path");

    std::size_t grid = 20;
    std::optional<std::string> sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Criterion spreads over a rho grid");
    add_config(sweep);
    sweep->add_option("--rho-grid", grid, "number of grid points");
    sweep->add_option("--out", sweep_out, "CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return exit_invalid;
    }

    try {
        const auto cfg = load_config(config_path);
        if (validate->parsed()) return cmd_validate(cfg, out);
        if (criterion->parsed()) return cmd_criterion(cfg, rho_flag, tol_flag, out);
        if (cert->parsed()) return cmd_certify(cfg, text, out);
        if (feas->parsed()) return cmd_feasibility(cfg, rho_flag, out);
        if (sim->parsed()) return cmd_simulate(cfg, sim_opt, out, err);
        if (sweep->parsed()) return cmd_sweep(cfg, grid, sweep_out, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid;
    }
    return exit_invalid;
}

}  // namespace curved_nbody::cli
