#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "sigmak/errors.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/symmat.hpp"

namespace sigmak {

/// Named smooth periodic shape with closed-form derivatives, used to build
/// right-hand sides and reference solutions without an expression parser.
/// Entries are 2pi-periodic in each coordinate they use.
struct CatalogEntry {
    const char* name;
    int min_dim;
    double (*value)(const std::array<double, 3>&);
    double (*deriv)(int, const std::array<double, 3>&);
    double (*deriv2)(int, int, const std::array<double, 3>&);
};

namespace catalog_detail {

inline double one_v(const std::array<double, 3>&) { return 1.0; }
inline double one_d(int, const std::array<double, 3>&) { return 0.0; }
inline double one_d2(int, int, const std::array<double, 3>&) { return 0.0; }

inline double sinx_v(const std::array<double, 3>& x) { return std::sin(x[0]); }
inline double sinx_d(int a, const std::array<double, 3>& x) {
    return a == 0 ? std::cos(x[0]) : 0.0;
}
inline double sinx_d2(int a, int b, const std::array<double, 3>& x) {
    return (a == 0 && b == 0) ? -std::sin(x[0]) : 0.0;
}

inline double cosx_v(const std::array<double, 3>& x) { return std::cos(x[0]); }
inline double cosx_d(int a, const std::array<double, 3>& x) {
    return a == 0 ? -std::sin(x[0]) : 0.0;
}
inline double cosx_d2(int a, int b, const std::array<double, 3>& x) {
    return (a == 0 && b == 0) ? -std::cos(x[0]) : 0.0;
}

inline double sxcy_v(const std::array<double, 3>& x) { return std::sin(x[0]) * std::cos(x[1]); }
inline double sxcy_d(int a, const std::array<double, 3>& x) {
    if (a == 0) return std::cos(x[0]) * std::cos(x[1]);
    if (a == 1) return -std::sin(x[0]) * std::sin(x[1]);
    return 0.0;
}
inline double sxcy_d2(int a, int b, const std::array<double, 3>& x) {
    if (a > b) std::swap(a, b);
    if (a == 0 && b == 0) return -std::sin(x[0]) * std::cos(x[1]);
    if (a == 0 && b == 1) return -std::cos(x[0]) * std::sin(x[1]);
    if (a == 1 && b == 1) return -std::sin(x[0]) * std::cos(x[1]);
    return 0.0;
}

inline double cxcy_v(const std::array<double, 3>& x) { return std::cos(x[0]) * std::cos(x[1]); }
inline double cxcy_d(int a, const std::array<double, 3>& x) {
    if (a == 0) return -std::sin(x[0]) * std::cos(x[1]);
    if (a == 1) return -std::cos(x[0]) * std::sin(x[1]);
    return 0.0;
}
inline double cxcy_d2(int a, int b, const std::array<double, 3>& x) {
    if (a > b) std::swap(a, b);
    if (a == 0 && b == 0) return -std::cos(x[0]) * std::cos(x[1]);
    if (a == 0 && b == 1) return std::sin(x[0]) * std::sin(x[1]);
    if (a == 1 && b == 1) return -std::cos(x[0]) * std::cos(x[1]);
    return 0.0;
}

inline double sxcycz_v(const std::array<double, 3>& x) {
    return std::sin(x[0]) * std::cos(x[1]) * std::cos(x[2]);
}
inline double sxcycz_d(int a, const std::array<double, 3>& x) {
    if (a == 0) return std::cos(x[0]) * std::cos(x[1]) * std::cos(x[2]);
    if (a == 1) return -std::sin(x[0]) * std::sin(x[1]) * std::cos(x[2]);
    return -std::sin(x[0]) * std::cos(x[1]) * std::sin(x[2]);
}
inline double sxcycz_d2(int a, int b, const std::array<double, 3>& x) {
    if (a > b) std::swap(a, b);
    const double sx = std::sin(x[0]), cx = std::cos(x[0]);
    const double sy = std::sin(x[1]), cy = std::cos(x[1]);
    const double sz = std::sin(x[2]), cz = std::cos(x[2]);
    if (a == 0 && b == 0) return -sx * cy * cz;
    if (a == 0 && b == 1) return -cx * sy * cz;
    if (a == 0 && b == 2) return -cx * cy * sz;
    if (a == 1 && b == 1) return -sx * cy * cz;
    if (a == 1 && b == 2) return sx * sy * sz;
    return -sx * cy * cz; // a == b == 2
}

inline constexpr CatalogEntry kEntries[] = {
    {"one", 2, one_v, one_d, one_d2},
    {"sinx", 2, sinx_v, sinx_d, sinx_d2},
    {"cosx", 2, cosx_v, cosx_d, cosx_d2},
    {"sinxcosy", 2, sxcy_v, sxcy_d, sxcy_d2},
    {"cosxcosy", 2, cxcy_v, cxcy_d, cxcy_d2},
    {"sinxcosycosz", 3, sxcycz_v, sxcycz_d, sxcycz_d2},
};

} // namespace catalog_detail

[[nodiscard]] inline const CatalogEntry& catalog_lookup(std::string_view name) {
    for (const auto& e : catalog_detail::kEntries)
        if (name == e.name) return e;
    throw DomainError("catalog_lookup: unknown shape '" + std::string(name) + "'");
}

[[nodiscard]] inline const CatalogEntry& catalog_lookup(std::string_view name, int dim) {
    const CatalogEntry& e = catalog_lookup(name);
    if (dim < e.min_dim)
        throw DomainError("catalog_lookup: shape '" + std::string(name) + "' needs dimension >= " +
                          std::to_string(e.min_dim));
    return e;
}

/// Samples base + amp * shape(x) over the grid.
[[nodiscard]] inline GridField sample_catalog(const TorusGrid& g, std::string_view name, double amp,
                                              double base = 0.0) {
    const CatalogEntry& e = catalog_lookup(name, g.dim);
    GridField f(g);
    for (std::size_t i = 0; i < g.npoints; ++i) f[i] = base + amp * e.value(g.point(i));
    return f;
}

/// Analytic gradient of amp * shape at one point, truncated to grid dimension.
[[nodiscard]] inline std::array<double, 3> catalog_gradient(const CatalogEntry& e, double amp,
                                                            const std::array<double, 3>& x, int dim) {
    std::array<double, 3> g{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) g[static_cast<std::size_t>(a)] = amp * e.deriv(a, x);
    return g;
}

/// Analytic Hessian of amp * shape at one point as a dim x dim matrix.
[[nodiscard]] inline SymMat catalog_hessian(const CatalogEntry& e, double amp,
                                            const std::array<double, 3>& x, int dim) {
    SymMat h(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) h.set(a, b, amp * e.deriv2(a, b, x));
    return h;
}

} // namespace sigmak
