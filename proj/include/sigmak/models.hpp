#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "sigmak/errors.hpp"

namespace sigmak {

enum class ModelKind { sphere, real_projective, complex_projective };

/// Closed-form curvature data for the standard Einstein model spaces. All
/// fields are exact constants of the round/Fubini-Study metrics; real_dim is
/// the manifold dimension n and must be at least 3 for the Schouten-type
/// tensor to exist.
struct ModelGeometry {
    ModelKind kind;
    int param;               // n for sphere / real projective, m for complex projective
    int real_dim;
    double ricci_multiple;   // Ric = ricci_multiple * g
    double scalar_curv;      // real_dim * ricci_multiple
    double diameter;
    double schouten_multiple; // (ricci_multiple - scalar_curv / (2 (n-1))) / (n-2)
};

namespace detail {

[[nodiscard]] inline double schouten_from(double ricci_multiple, int n) {
    const double scalar = n * ricci_multiple;
    return (ricci_multiple - scalar / (2.0 * (n - 1))) / (n - 2);
}

} // namespace detail

[[nodiscard]] inline ModelGeometry make_sphere(int n) {
    if (n < 3) throw DomainError("make_sphere: dimension " + std::to_string(n) + " below 3");
    ModelGeometry m{};
    m.kind = ModelKind::sphere;
    m.param = n;
    m.real_dim = n;
    m.ricci_multiple = n - 1.0;
    m.scalar_curv = n * (n - 1.0);
    m.diameter = std::numbers::pi;
    m.schouten_multiple = detail::schouten_from(m.ricci_multiple, n);
    return m;
}

/// Same local geometry as the sphere; antipodal identification halves the
/// diameter.
[[nodiscard]] inline ModelGeometry make_real_projective(int n) {
    ModelGeometry m = make_sphere(n);
    m.kind = ModelKind::real_projective;
    m.diameter = std::numbers::pi / 2.0;
    return m;
}

/// Complex projective space of complex dimension m (real dimension 2m) with
/// the Fubini-Study normalization Ric = (2m + 2) g.
[[nodiscard]] inline ModelGeometry make_complex_projective(int m) {
    const int n = 2 * m;
    if (n < 3)
        throw DomainError("make_complex_projective: real dimension " + std::to_string(n) +
                          " below 3");
    ModelGeometry out{};
    out.kind = ModelKind::complex_projective;
    out.param = m;
    out.real_dim = n;
    out.ricci_multiple = 2.0 * m + 2.0;
    out.scalar_curv = n * out.ricci_multiple;
    out.diameter = std::numbers::pi / 2.0;
    out.schouten_multiple = detail::schouten_from(out.ricci_multiple, n);
    return out;
}

struct ModelInvariant {
    double schouten_multiple;
    double diameter;
    double invariant; // schouten_multiple * diameter^2
};

/// The scale-invariant product lambda_max(Schouten) * diameter^2 that decides
/// feasibility of the determinant-equation threshold pi^2 / 2.
[[nodiscard]] inline ModelInvariant model_schouten(const ModelGeometry& m) {
    if (m.real_dim < 3) throw DomainError("model_schouten: real dimension below 3");
    return {m.schouten_multiple, m.diameter, m.schouten_multiple * m.diameter * m.diameter};
}

struct ModelTableRow {
    std::string name;
    ModelGeometry geometry;
    ModelInvariant invariant;
    bool feasible; // invariant < pi^2 / 2
};

/// Standard table: spheres and real projective spaces of dimension 3..8,
/// complex projective spaces of complex dimension 2..4.
[[nodiscard]] inline std::vector<ModelTableRow> model_table() {
    const double threshold = std::numbers::pi * std::numbers::pi / 2.0;
    std::vector<ModelTableRow> rows;
    auto push = [&](std::string name, const ModelGeometry& g) {
        const ModelInvariant inv = model_schouten(g);
        rows.push_back({std::move(name), g, inv, inv.invariant < threshold});
    };
    for (int n = 3; n <= 8; ++n) push("sphere(" + std::to_string(n) + ")", make_sphere(n));
    for (int n = 3; n <= 8; ++n)
        push("real_projective(" + std::to_string(n) + ")", make_real_projective(n));
    for (int m = 2; m <= 4; ++m)
        push("complex_projective(" + std::to_string(m) + ")", make_complex_projective(m));
    return rows;
}

} // namespace sigmak
