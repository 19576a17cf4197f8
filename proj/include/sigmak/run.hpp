#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigmak/config.hpp"
#include "sigmak/errors.hpp"
#include "sigmak/estimates.hpp"
#include "sigmak/field_io.hpp"
#include "sigmak/identities.hpp"
#include "sigmak/manufacture.hpp"
#include "sigmak/models.hpp"
#include "sigmak/solver.hpp"

namespace sigmak {

// Exit-code contract shared by all commands.
constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotAdmissible = 3;
constexpr int kExitNoConvergence = 4;

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

[[nodiscard]] inline nlohmann::json state_json(const ContinuationState& st) {
    nlohmann::json j;
    j["t"] = st.t;
    j["dt"] = st.dt;
    j["newton_iters"] = st.newton_iters;
    j["residual_sup"] = st.residual_sup;
    j["u_min"] = st.u_min;
    j["u_max"] = st.u_max;
    j["sigma_km1_max"] = st.sigma_km1_max;
    j["hess_eig_max"] = st.hess_eig_max;
    return j;
}

[[nodiscard]] inline nlohmann::json c0_json(const C0Report& r) {
    nlohmann::json j;
    j["ok"] = r.ok;
    j["two_sided"] = r.two_sided;
    j["lower"] = r.lower;
    j["upper"] = r.upper;
    j["u_min"] = r.u_min;
    j["u_max"] = r.u_max;
    j["margin_lower"] = r.margin_lower;
    j["margin_upper"] = r.margin_upper;
    return j;
}

[[nodiscard]] inline nlohmann::json phi_json(const PhiConstants& c, const PhiReport& r) {
    nlohmann::json j;
    j["p"] = c.p;
    j["c1"] = c.c1;
    j["c2"] = c.c2;
    j["positive_mode"] = c.positive_mode;
    j["ok"] = r.ok;
    j["worst_first"] = r.worst_first;
    j["worst_second"] = r.worst_second;
    return j;
}

[[nodiscard]] inline nlohmann::json harnack_json(const HarnackReport& r) {
    nlohmann::json j;
    j["ok"] = r.ok;
    j["gap"] = r.gap;
    j["sup_u"] = r.sup_u;
    j["inf_u"] = r.inf_u;
    j["slack"] = r.slack;
    return j;
}

[[nodiscard]] inline nlohmann::json convexity_json(const ConvexityReport& r) {
    nlohmann::json j;
    j["ok"] = r.ok;
    j["min_eigenvalue"] = r.min_eigenvalue;
    j["failed_points"] = r.failed_points;
    return j;
}

[[nodiscard]] inline nlohmann::json diagnostics_json(const Diagnostics& d) {
    nlohmann::json j;
    j["grad_sup"] = d.grad_sup;
    j["shifted_hess_eig_max"] = d.shifted_hess_eig_max;
    j["sigma_km1_max"] = d.sigma_km1_max;
    return j;
}

[[nodiscard]] inline nlohmann::json identity_json(const IdentityReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["trials"] = r.trials;
    j["worst_error"] = r.worst_error;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["observed_envelope"] = r.observed_envelope;
    if (!r.offender.empty()) j["offender"] = r.offender;
    return j;
}

/// Admissibility of the exponential segments between consecutive stored
/// iterates; reported so a bundle documents path-connectedness of its states.
[[nodiscard]] inline nlohmann::json trace_segments_json(const std::vector<ContinuationState>& trace,
                                                        const Problem& p) {
    nlohmann::json j;
    std::size_t pairs = 0;
    bool all_ok = true;
    nlohmann::json first_failure;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        GridField w0 = trace[i].u;
        GridField w1 = trace[i + 1].u;
        for (std::size_t q = 0; q < w0.size(); ++q) w0[q] = std::exp(w0[q]);
        for (std::size_t q = 0; q < w1.size(); ++q) w1[q] = std::exp(w1[q]);
        SegmentFailure fail;
        const bool ok = admissible_segment_test(w0, w1, p, 33, &fail);
        ++pairs;
        if (!ok && all_ok) {
            all_ok = false;
            first_failure["pair"] = i;
            first_failure["s"] = fail.s;
            first_failure["point"] = fail.point;
        }
    }
    j["pairs"] = pairs;
    j["all_admissible"] = all_ok;
    if (!all_ok) j["first_failure"] = first_failure;
    return j;
}

} // namespace detail

/// Runs the randomized identity suite, prints one line per identity, writes
/// the line-delimited report when a path is given, and fails on any violation.
inline int cmd_verify_identities(const IdentitySuiteConfig& cfg, const std::string& report_path,
                                 std::ostream& log) {
    std::vector<IdentityReport> reports;
    if (cfg.trials > 0) reports = run_identity_suite(cfg);
    std::string lines;
    int failures = 0;
    for (const IdentityReport& r : reports) {
        lines += detail::identity_json(r).dump() + "\n";
        log << (r.pass ? "pass  " : "FAIL  ") << r.name << "  trials " << r.trials << "  worst "
            << format_double(r.worst_error) << "  tol " << format_double(r.tolerance);
        if (r.observed_envelope != 0.0) log << "  envelope " << format_double(r.observed_envelope);
        log << "\n";
        if (!r.pass) {
            ++failures;
            log << "      offender:";
            for (double v : r.offender) log << ' ' << format_double(v);
            log << "\n";
        }
    }
    if (!report_path.empty()) detail::write_text(report_path, lines);
    return failures == 0 ? kExitOk : kExitViolation;
}

/// Solves the configured problem and writes the full artifact bundle into the
/// output directory: config echo, trace, solution field, audit report, and a
/// machine-readable error record when the solve fails.
inline int cmd_solve(const RunConfig& c, std::ostream& log) {
    std::filesystem::create_directories(c.out_dir);
    const auto at = [&](const std::string& name) { return c.out_dir + "/" + name; };
    detail::write_text(at("config.json"), config_echo(c).dump(2) + "\n");

    std::vector<ContinuationState> trace;
    nlohmann::json error;
    int code = kExitOk;
    std::optional<GridField> final_u;
    Problem p;

    try {
        p = build_problem(c);
        if (c.variant == Variant::negative_experimental && !c.experimental_ack)
            throw ConfigError("config: the negative orientation is experimental; "
                              "acknowledge it with experimental_ack or --experimental");
        switch (c.variant) {
            case Variant::standard:
            case Variant::negative_experimental: {
                ContinuationResult res = continuation_solve(p, c.solver, &trace);
                final_u = std::move(res.u);
                break;
            }
            case Variant::determinant_normalized: {
                const NormalizedProblem np = make_normalized(p);
                const GridField ones(p.grid, 1.0);
                ContinuationResult res = normalized_continuation(np, c.solver, ones, &trace);
                final_u = std::move(res.u);
                break;
            }
            case Variant::determinant_fixed_point: {
                FixedPointResult res = fixed_point_solve(p, c.t_schedule, c.solver, &trace);
                final_u = std::move(res.u);
                break;
            }
        }
    } catch (const ConfigError& e) {
        code = kExitConfig;
        error["type"] = "ConfigError";
        error["message"] = e.what();
    } catch (const DomainError& e) {
        code = kExitConfig;
        error["type"] = "DomainError";
        error["message"] = e.what();
    } catch (const HarnackInfeasible& e) {
        code = kExitNotAdmissible;
        error["type"] = "HarnackInfeasible";
        error["message"] = e.what();
        error["lambda_max"] = e.lambda_max();
        error["diameter"] = e.diameter();
    } catch (const NotAdmissible& e) {
        code = kExitNotAdmissible;
        error["type"] = "NotAdmissible";
        error["message"] = e.what();
        if (e.point() != NotAdmissible::npos) error["point"] = e.point();
        error["level"] = e.level();
    } catch (const ContinuationStalled& e) {
        code = kExitNoConvergence;
        error["type"] = "ContinuationStalled";
        error["message"] = e.what();
        error["t_reached"] = e.t_reached();
    } catch (const FixedPointStalled& e) {
        code = kExitNoConvergence;
        error["type"] = "FixedPointStalled";
        error["message"] = e.what();
        error["iterations"] = e.iterations();
        error["gap"] = e.gap();
    } catch (const NoConvergence& e) {
        code = kExitNoConvergence;
        error["type"] = "NoConvergence";
        error["message"] = e.what();
        error["iterations"] = e.iterations();
        error["residual"] = e.residual();
    }

    std::string trace_lines;
    for (const ContinuationState& st : trace) trace_lines += detail::state_json(st).dump() + "\n";
    detail::write_text(at("trace.jsonl"), trace_lines);

    if (final_u) {
        write_field(*final_u, at("u"));
    } else if (!trace.empty()) {
        write_field(trace.back().u, at("u_partial"));
    }

    nlohmann::json audit;
    audit["seed"] = c.seed;
    audit["variant"] = variant_name(c.variant);
    audit["completed"] = final_u.has_value();
    audit["states"] = trace.size();
    long iters_total = 0;
    for (const ContinuationState& st : trace) iters_total += st.newton_iters;
    audit["newton_iters_total"] = iters_total;
    if (!trace.empty()) audit["residual_sup"] = trace.back().residual_sup;

    // Audit-phase failures must still leave a complete bundle behind, so they
    // are recorded in the error document instead of propagating.
    if (final_u) try {
        const GridField& u = *final_u;
        audit["diagnostics"] = detail::diagnostics_json(diagnostics(u, p));
        const bool determinant = c.variant == Variant::determinant_normalized ||
                                 c.variant == Variant::determinant_fixed_point;
        if (c.variant == Variant::standard) {
            audit["c0"] = detail::c0_json(verify_c0(u, c0_bounds(p)));
            const C0Bounds hull = homotopy_c0_bounds(p);
            bool hull_ok = true;
            for (const ContinuationState& st : trace)
                hull_ok = hull_ok && st.u_min > hull.lower && st.u_max < hull.upper;
            audit["trace_within_hull"] = hull_ok;
        } else if (c.variant == Variant::determinant_normalized) {
            audit["c0"] = detail::c0_json(verify_c0(u, normalized_c0_bounds(p, p.grid.volume())));
        } else if (c.variant == Variant::determinant_fixed_point) {
            audit["c0"] = detail::c0_json(verify_c0(u, c0_bounds(p)));
        } else {
            audit["negative_residual_sup"] = negative_residual(u, p).sup_norm();
        }
        if (determinant) {
            const double diam = effective_diameter(c, p.grid);
            nlohmann::json hj;
            try {
                hj = detail::harnack_json(verify_harnack(u, p.S, diam));
                hj["feasible"] = true;
            } catch (const HarnackInfeasible& e) {
                hj["feasible"] = false;
                hj["lambda_max"] = e.lambda_max();
                hj["diameter"] = e.diameter();
            }
            audit["harnack"] = hj;
            audit["v_convexity"] = detail::convexity_json(verify_v_convexity(u, p.S));
        }
        if (c.variant != Variant::negative_experimental)
            audit["trace_segments"] = detail::trace_segments_json(trace, p);
        if (!c.u_ref.empty()) {
            const GridField ref = read_field(c.u_ref);
            if (!ref.grid.same_shape(p.grid))
                throw ConfigError("u_ref field does not match the configured grid");
            audit["u_ref_error_sup"] = sup_distance(u, ref);
        }
    } catch (const ConfigError& e) {
        code = kExitConfig;
        error["type"] = "ConfigError";
        error["message"] = e.what();
    } catch (const DomainError& e) {
        code = kExitConfig;
        error["type"] = "DomainError";
        error["message"] = e.what();
    } catch (const NotAdmissible& e) {
        code = kExitNotAdmissible;
        error["type"] = "NotAdmissible";
        error["message"] = e.what();
    }
    detail::write_text(at("audit.json"), audit.dump(2) + "\n");

    if (code != kExitOk) {
        error["code"] = code;
        detail::write_text(at("error.json"), error.dump(2) + "\n");
        log << "solve failed (" << error["type"].get<std::string>() << "): "
            << error["message"].get<std::string>() << "\n";
    } else {
        log << "solved: states " << trace.size() << ", final residual "
            << format_double(trace.empty() ? 0.0 : trace.back().residual_sup) << ", u in ["
            << format_double(final_u->min()) << ", " << format_double(final_u->max()) << "]\n";
    }
    return code;
}

/// Builds a manufactured problem around a catalog profile: writes the
/// reference field, the matching right-hand factor, and a ready-to-solve
/// configuration document.
inline int cmd_manufacture(const RunConfig& c, std::ostream& log) {
    if (c.manufacture_name.empty())
        throw ConfigError("config: manufacture requires a manufacture.name entry");
    std::filesystem::create_directories(c.out_dir);
    const auto at = [&](const std::string& name) { return c.out_dir + "/" + name; };

    const Problem p = build_problem(c);
    ManufactureSpec spec;
    spec.grid = p.grid;
    spec.k = c.k;
    spec.S = p.S;
    spec.u_name = c.manufacture_name;
    spec.amplitude = c.manufacture_amplitude;

    Manufactured m;
    try {
        m = manufacture(spec);
    } catch (const NotAdmissible& e) {
        nlohmann::json error;
        error["code"] = kExitNotAdmissible;
        error["type"] = "NotAdmissible";
        error["message"] = e.what();
        if (e.point() != NotAdmissible::npos) error["point"] = e.point();
        detail::write_text(at("error.json"), error.dump(2) + "\n");
        log << "manufacture failed: " << e.what() << "\n";
        return kExitNotAdmissible;
    }

    write_field(m.u_ref, at("u_ref"));
    write_field(m.f, at("f"));

    nlohmann::json solve_cfg;
    solve_cfg["dimension"] = c.dimension;
    solve_cfg["k"] = c.k;
    solve_cfg["sizes"] = c.sizes;
    if (!c.lengths.empty()) solve_cfg["lengths"] = c.lengths;
    solve_cfg["S"] = {{"diag", c.s_diag},
                      {"perturb_name", c.s_perturb_name},
                      {"perturb_amp", c.s_perturb_amp}};
    solve_cfg["psi"] = {{"a", 1.0}, {"field", at("f")}};
    solve_cfg["variant"] = "standard";
    solve_cfg["seed"] = c.seed;
    solve_cfg["out"] = at("solve_out");
    solve_cfg["u_ref"] = at("u_ref");
    detail::write_text(at("solve_config.json"), solve_cfg.dump(2) + "\n");

    log << "manufactured '" << c.manufacture_name << "' amplitude "
        << format_double(c.manufacture_amplitude) << ": f in [" << format_double(m.f.min()) << ", "
        << format_double(m.f.max()) << "]\n";
    return kExitOk;
}

/// Prints the model-geometry invariant table and writes it as CSV and
/// line-delimited JSON when an output directory is given.
inline int cmd_models(const std::string& out_dir, std::ostream& log) {
    const std::vector<ModelTableRow> rows = model_table();
    std::string csv = "name,real_dim,ricci_multiple,scalar_curvature,schouten_multiple,diameter,"
                      "invariant,feasible\n";
    std::string jsonl;
    for (const ModelTableRow& r : rows) {
        csv += r.name + "," + std::to_string(r.geometry.real_dim) + "," +
               format_double(r.geometry.ricci_multiple) + "," +
               format_double(r.geometry.scalar_curv) + "," +
               format_double(r.geometry.schouten_multiple) + "," +
               format_double(r.geometry.diameter) + "," + format_double(r.invariant.invariant) +
               "," + (r.feasible ? "true" : "false") + "\n";
        nlohmann::json j;
        j["name"] = r.name;
        j["real_dim"] = r.geometry.real_dim;
        j["ricci_multiple"] = r.geometry.ricci_multiple;
        j["scalar_curvature"] = r.geometry.scalar_curv;
        j["schouten_multiple"] = r.geometry.schouten_multiple;
        j["diameter"] = r.geometry.diameter;
        j["invariant"] = r.invariant.invariant;
        j["feasible"] = r.feasible;
        jsonl += j.dump() + "\n";
        log << r.name << "  schouten " << format_double(r.geometry.schouten_multiple)
            << "  diameter " << format_double(r.geometry.diameter) << "  invariant "
            << format_double(r.invariant.invariant) << (r.feasible ? "  feasible" : "  infeasible")
            << "\n";
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        detail::write_text(out_dir + "/models.csv", csv);
        detail::write_text(out_dir + "/models.jsonl", jsonl);
    }
    return kExitOk;
}

/// Evaluates the a-priori machinery for a configured problem without solving:
/// solution bounds, barrier constants for both orientations, and the Harnack
/// gap (reported as infeasible rather than thrown).
inline int cmd_bounds(const RunConfig& c, std::ostream& log) {
    const Problem p = build_problem(c);
    nlohmann::json report;
    report["seed"] = c.seed;

    const C0Bounds b = c0_bounds(p);
    report["c0"] = {{"lower", b.lower}, {"upper", b.upper}, {"two_sided", b.two_sided}};

    for (const bool mode : {true, false}) {
        const PhiConstants pc = phi_constants(b, mode);
        const PhiReport pr = phi_inequality_report(pc, b.lower, b.upper, 10000);
        report[mode ? "phi_positive" : "phi_negative"] = detail::phi_json(pc, pr);
    }

    const double diam = effective_diameter(c, p.grid);
    nlohmann::json harnack;
    harnack["diameter"] = diam;
    harnack["lambda_max"] = max_top_eigenvalue(p.S);
    try {
        harnack["gap"] = harnack_gap(p.S, diam);
        harnack["feasible"] = true;
    } catch (const HarnackInfeasible&) {
        harnack["feasible"] = false;
    }
    report["harnack"] = harnack;

    if (!c.out_dir.empty()) {
        std::filesystem::create_directories(c.out_dir);
        detail::write_text(c.out_dir + "/bounds.json", report.dump(2) + "\n");
    }
    log << "c0 [" << format_double(b.lower) << ", " << format_double(b.upper) << "] "
        << (b.two_sided ? "two-sided" : "one-sided") << "; harnack "
        << (harnack["feasible"].get<bool>() ? format_double(harnack["gap"].get<double>())
                                            : std::string("infeasible"))
        << "\n";
    return kExitOk;
}

} // namespace sigmak
