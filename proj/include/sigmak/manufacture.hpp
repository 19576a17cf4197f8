#pragma once

#include <cmath>
#include <string>

#include "sigmak/catalog.hpp"
#include "sigmak/errors.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/pde.hpp"
#include "sigmak/symfunc.hpp"

namespace sigmak {

struct ManufactureSpec {
    TorusGrid grid;
    int k = 1;
    TensorField S;
    std::string u_name;   // catalog shape of the reference solution
    double amplitude = 0.0;
};

struct Manufactured {
    GridField u_ref; // the chosen exact solution
    GridField f;     // right-hand factor making u_ref solve sigma_k^{1/k}(W) = f e^u
};

/// Builds a problem with a known exact solution: the augmented Hessian of the
/// reference field is assembled from closed-form derivatives (not stencils),
/// so the emitted f makes u_ref solve the continuum equation exactly and the
/// discrete one up to truncation error. Throws NotAdmissible at the first
/// point where the reference leaves the cone.
[[nodiscard]] inline Manufactured manufacture(const ManufactureSpec& spec) {
    if (spec.k < 1 || spec.k > spec.grid.dim)
        throw DomainError("manufacture: level outside 1..dim");
    if (!spec.grid.same_shape(spec.S.grid)) throw DomainError("manufacture: grid mismatch");
    const CatalogEntry& entry = catalog_lookup(spec.u_name, spec.grid.dim);
    const ConeSpec cone{spec.k, Sign::positive, 1.0};

    Manufactured out;
    out.u_ref = GridField(spec.grid);
    out.f = GridField(spec.grid);
    const int d = spec.grid.dim;
    for (std::size_t i = 0; i < spec.grid.npoints; ++i) {
        const std::array<double, 3> x = spec.grid.point(i);
        const double uv = spec.amplitude * entry.value(x);
        const std::array<double, 3> du = catalog_gradient(entry, spec.amplitude, x, d);
        SymMat w = catalog_hessian(entry, spec.amplitude, x, d);
        double norm2 = 0.0;
        for (int a = 0; a < d; ++a) norm2 += du[static_cast<std::size_t>(a)] *
                                             du[static_cast<std::size_t>(a)];
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b)
                w.add(a, b, du[static_cast<std::size_t>(a)] * du[static_cast<std::size_t>(b)]);
        w.add_scaled_identity(-0.5 * norm2);
        w += spec.S[i];
        if (!in_cone(w, cone))
            throw NotAdmissible("manufacture: reference solution leaves the cone at point " +
                                    std::to_string(i),
                                i, spec.k);
        out.u_ref[i] = uv;
        out.f[i] = std::pow(sigma_mat(w, spec.k), 1.0 / spec.k) * std::exp(-uv);
    }
    return out;
}

} // namespace sigmak
