#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigmak/catalog.hpp"
#include "sigmak/errors.hpp"
#include "sigmak/field_io.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/pde.hpp"
#include "sigmak/solver.hpp"

namespace sigmak {

enum class Variant { standard, negative_experimental, determinant_normalized, determinant_fixed_point };

[[nodiscard]] inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::standard: return "standard";
        case Variant::negative_experimental: return "negative-experimental";
        case Variant::determinant_normalized: return "determinant-normalized";
        case Variant::determinant_fixed_point: return "determinant-fixed-point";
    }
    return "standard";
}

/// Declarative run description. Parsed strictly: unknown keys anywhere in the
/// document are rejected, so typos cannot silently change a run.
struct RunConfig {
    int dimension = 2;
    int k = 2;
    std::vector<int> sizes;
    std::vector<double> lengths; // empty selects 2 pi per axis

    std::vector<double> s_diag;  // constant diagonal part of S
    std::string s_perturb_name = "one";
    double s_perturb_amp = 0.0;  // S += amp * shape(x) * I

    double a = 1.0;
    std::string f_name = "one";  // f = base + amp * shape(x), or a field file
    double f_base = 1.0;
    double f_amp = 0.0;
    std::string f_field;         // path base of a stored field (overrides catalog)

    Variant variant = Variant::standard;
    SolverOptions solver;
    std::vector<double> t_schedule; // determinant-fixed-point only
    double diameter_override = 0.0; // 0 selects the grid's flat diameter

    std::uint64_t seed = 42;
    std::string out_dir = "out";
    std::string u_ref;           // optional reference field path base
    bool experimental_ack = false;

    std::string manufacture_name;      // manufacture command: catalog shape
    double manufacture_amplitude = 0.0;
};

namespace detail {

inline void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
    for (const auto& item : j.items())
        if (allowed.find(item.key()) == allowed.end())
            throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
}

template <class T>
[[nodiscard]] T get_or(const nlohmann::json& j, const std::string& key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
}

} // namespace detail

[[nodiscard]] inline RunConfig parse_config(const nlohmann::json& j) {
    detail::require_keys(j, {"dimension", "k", "sizes", "lengths", "S", "psi", "variant", "solver",
                             "t_schedule", "diameter", "seed", "out", "u_ref", "experimental_ack",
                             "manufacture"},
                         "document root");
    RunConfig c;
    c.dimension = detail::get_or(j, "dimension", 2);
    c.k = detail::get_or(j, "k", 2);
    c.sizes = detail::get_or(j, "sizes", std::vector<int>{});
    c.lengths = detail::get_or(j, "lengths", std::vector<double>{});
    if (c.sizes.empty()) throw ConfigError("config: 'sizes' is required");

    if (j.contains("S")) {
        const auto& s = j.at("S");
        detail::require_keys(s, {"diag", "perturb_name", "perturb_amp"}, "S");
        c.s_diag = detail::get_or(s, "diag", std::vector<double>{});
        c.s_perturb_name = detail::get_or(s, "perturb_name", std::string("one"));
        c.s_perturb_amp = detail::get_or(s, "perturb_amp", 0.0);
    }
    if (c.s_diag.empty()) c.s_diag.assign(static_cast<std::size_t>(c.dimension), 1.0);

    if (j.contains("psi")) {
        const auto& p = j.at("psi");
        detail::require_keys(p, {"a", "name", "base", "amp", "field"}, "psi");
        c.a = detail::get_or(p, "a", 1.0);
        c.f_name = detail::get_or(p, "name", std::string("one"));
        c.f_base = detail::get_or(p, "base", 1.0);
        c.f_amp = detail::get_or(p, "amp", 0.0);
        c.f_field = detail::get_or(p, "field", std::string());
    }

    const std::string var = detail::get_or(j, "variant", std::string("standard"));
    if (var == "standard") c.variant = Variant::standard;
    else if (var == "negative-experimental") c.variant = Variant::negative_experimental;
    else if (var == "determinant-normalized") c.variant = Variant::determinant_normalized;
    else if (var == "determinant-fixed-point") c.variant = Variant::determinant_fixed_point;
    else throw ConfigError("config: unknown variant '" + var + "'");

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        detail::require_keys(s,
                             {"residual_tol", "max_newton_iters", "line_search_shrink", "min_step",
                              "dt_initial", "dt_min", "linear_tol", "linear_max_iters"},
                             "solver");
        c.solver.residual_tol = detail::get_or(s, "residual_tol", c.solver.residual_tol);
        c.solver.max_newton_iters = detail::get_or(s, "max_newton_iters", c.solver.max_newton_iters);
        c.solver.line_search_shrink =
            detail::get_or(s, "line_search_shrink", c.solver.line_search_shrink);
        c.solver.min_step = detail::get_or(s, "min_step", c.solver.min_step);
        c.solver.dt_initial = detail::get_or(s, "dt_initial", c.solver.dt_initial);
        c.solver.dt_min = detail::get_or(s, "dt_min", c.solver.dt_min);
        c.solver.linear_tol = detail::get_or(s, "linear_tol", c.solver.linear_tol);
        c.solver.linear_max_iters = detail::get_or(s, "linear_max_iters", c.solver.linear_max_iters);
    }

    c.t_schedule = detail::get_or(j, "t_schedule", std::vector<double>{});
    c.diameter_override = detail::get_or(j, "diameter", 0.0);
    c.seed = detail::get_or(j, "seed", static_cast<std::uint64_t>(42));
    c.out_dir = detail::get_or(j, "out", std::string("out"));
    c.u_ref = detail::get_or(j, "u_ref", std::string());
    c.experimental_ack = detail::get_or(j, "experimental_ack", false);

    if (j.contains("manufacture")) {
        const auto& m = j.at("manufacture");
        detail::require_keys(m, {"name", "amplitude"}, "manufacture");
        c.manufacture_name = detail::get_or(m, "name", std::string());
        c.manufacture_amplitude = detail::get_or(m, "amplitude", 0.0);
    }

    // Structural validation beyond shapes of individual values.
    try {
        (void)TorusGrid::make(c.dimension, c.sizes, c.lengths);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.k < 1 || c.k > c.dimension) throw ConfigError("config: k must lie in 1..dimension");
    if (static_cast<int>(c.s_diag.size()) != c.dimension)
        throw ConfigError("config: S.diag needs one entry per dimension");
    if (c.variant == Variant::determinant_normalized || c.variant == Variant::determinant_fixed_point) {
        if (c.k != c.dimension)
            throw ConfigError("config: determinant variants require k == dimension");
    }
    if (c.variant == Variant::determinant_fixed_point && c.a != -2.0)
        throw ConfigError("config: determinant-fixed-point requires psi exponent a = -2");
    if (c.variant == Variant::standard && c.a <= 0.0)
        throw ConfigError("config: the standard variant requires psi exponent a > 0");
    try {
        (void)catalog_lookup(c.s_perturb_name, c.dimension);
        if (c.f_field.empty()) (void)catalog_lookup(c.f_name, c.dimension);
        if (!c.manufacture_name.empty()) (void)catalog_lookup(c.manufacture_name, c.dimension);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

[[nodiscard]] inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    return parse_config(j);
}

/// Echo of the parsed configuration; written into every output bundle so a
/// run can be reproduced from its artifacts alone.
[[nodiscard]] inline nlohmann::json config_echo(const RunConfig& c) {
    nlohmann::json j;
    j["dimension"] = c.dimension;
    j["k"] = c.k;
    j["sizes"] = c.sizes;
    j["lengths"] = c.lengths;
    j["S"] = {{"diag", c.s_diag}, {"perturb_name", c.s_perturb_name}, {"perturb_amp", c.s_perturb_amp}};
    j["psi"] = {{"a", c.a}, {"name", c.f_name}, {"base", c.f_base}, {"amp", c.f_amp},
                {"field", c.f_field}};
    j["variant"] = variant_name(c.variant);
    j["solver"] = {{"residual_tol", c.solver.residual_tol},
                   {"max_newton_iters", c.solver.max_newton_iters},
                   {"line_search_shrink", c.solver.line_search_shrink},
                   {"min_step", c.solver.min_step},
                   {"dt_initial", c.solver.dt_initial},
                   {"dt_min", c.solver.dt_min},
                   {"linear_tol", c.solver.linear_tol},
                   {"linear_max_iters", c.solver.linear_max_iters}};
    j["t_schedule"] = c.t_schedule;
    j["diameter"] = c.diameter_override;
    j["seed"] = c.seed;
    j["u_ref"] = c.u_ref;
    j["experimental_ack"] = c.experimental_ack;
    j["manufacture"] = {{"name", c.manufacture_name}, {"amplitude", c.manufacture_amplitude}};
    return j;
}

/// Materializes the grid and fields described by the configuration.
[[nodiscard]] inline Problem build_problem(const RunConfig& c) {
    const TorusGrid grid = TorusGrid::make(c.dimension, c.sizes, c.lengths);
    Problem p;
    p.grid = grid;
    p.k = c.k;
    p.sign = (c.variant == Variant::negative_experimental) ? Sign::negative : Sign::positive;

    p.S = TensorField(grid, grid.dim);
    const SymMat base = SymMat::diagonal(c.s_diag);
    const CatalogEntry& pshape = catalog_lookup(c.s_perturb_name, grid.dim);
    for (std::size_t i = 0; i < grid.npoints; ++i) {
        SymMat m = base;
        if (c.s_perturb_amp != 0.0)
            m.add_scaled_identity(c.s_perturb_amp * pshape.value(grid.point(i)));
        p.S[i] = m;
    }

    if (!c.f_field.empty()) {
        GridField f = read_field(c.f_field);
        if (!f.grid.same_shape(grid))
            throw ConfigError("config: stored f field does not match the configured grid");
        p.psi = PsiSpec{std::move(f), c.a};
    } else {
        p.psi = PsiSpec{sample_catalog(grid, c.f_name, c.f_amp, c.f_base), c.a};
    }
    return p;
}

[[nodiscard]] inline double effective_diameter(const RunConfig& c, const TorusGrid& grid) {
    return c.diameter_override > 0.0 ? c.diameter_override : grid.diameter();
}

} // namespace sigmak
