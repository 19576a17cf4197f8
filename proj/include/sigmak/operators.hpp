#pragma once

#include <array>
#include <vector>

#include "sigmak/errors.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/symmat.hpp"

namespace sigmak {

/// Second-order central gradient with periodic wrap; one component field per
/// axis. Exact on constants.
[[nodiscard]] inline std::vector<GridField> gradient(const GridField& u) {
    const TorusGrid& g = u.grid;
    std::vector<GridField> out(static_cast<std::size_t>(g.dim), GridField(g));
    const int n0 = g.sizes[0];
    const int n1 = g.sizes[1];
    const int n2 = g.sizes[2];
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            for (int l = 0; l < n2; ++l) {
                const std::size_t at = g.index(i, j, l);
                out[0][at] = (u[g.index(i + 1, j, l)] - u[g.index(i - 1, j, l)]) / (2.0 * g.spacing[0]);
                out[1][at] = (u[g.index(i, j + 1, l)] - u[g.index(i, j - 1, l)]) / (2.0 * g.spacing[1]);
                if (g.dim == 3)
                    out[2][at] =
                        (u[g.index(i, j, l + 1)] - u[g.index(i, j, l - 1)]) / (2.0 * g.spacing[2]);
            }
        }
    }
    return out;
}

/// Discrete Hessian: 3-point second differences on the diagonal, 4-point
/// centered cross stencil off it. Symmetric by construction.
[[nodiscard]] inline TensorField hessian(const GridField& u) {
    const TorusGrid& g = u.grid;
    TensorField out(g, g.dim);
    const int n0 = g.sizes[0];
    const int n1 = g.sizes[1];
    const int n2 = g.sizes[2];
    const double h0 = g.spacing[0];
    const double h1 = g.spacing[1];
    const double h2 = g.spacing[2];
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            for (int l = 0; l < n2; ++l) {
                const std::size_t at = g.index(i, j, l);
                const double uc = u[at];
                SymMat& m = out[at];
                m.set(0, 0, (u[g.index(i + 1, j, l)] - 2.0 * uc + u[g.index(i - 1, j, l)]) / (h0 * h0));
                m.set(1, 1, (u[g.index(i, j + 1, l)] - 2.0 * uc + u[g.index(i, j - 1, l)]) / (h1 * h1));
                m.set(0, 1,
                      (u[g.index(i + 1, j + 1, l)] - u[g.index(i + 1, j - 1, l)] -
                       u[g.index(i - 1, j + 1, l)] + u[g.index(i - 1, j - 1, l)]) /
                          (4.0 * h0 * h1));
                if (g.dim == 3) {
                    m.set(2, 2,
                          (u[g.index(i, j, l + 1)] - 2.0 * uc + u[g.index(i, j, l - 1)]) / (h2 * h2));
                    m.set(0, 2,
                          (u[g.index(i + 1, j, l + 1)] - u[g.index(i + 1, j, l - 1)] -
                           u[g.index(i - 1, j, l + 1)] + u[g.index(i - 1, j, l - 1)]) /
                              (4.0 * h0 * h2));
                    m.set(1, 2,
                          (u[g.index(i, j + 1, l + 1)] - u[g.index(i, j + 1, l - 1)] -
                           u[g.index(i, j - 1, l + 1)] + u[g.index(i, j - 1, l - 1)]) /
                              (4.0 * h1 * h2));
                }
            }
        }
    }
    return out;
}

/// Augmented Hessian with flat background metric. Positive orientation:
/// hess(u) + du (x) du - (|du|^2 / 2) I + S; the negative orientation flips
/// the sign of both gradient terms.
[[nodiscard]] inline TensorField augmented_hessian(const GridField& u, const TensorField& s,
                                                   Sign sign) {
    const TorusGrid& g = u.grid;
    if (!g.same_shape(s.grid)) throw DomainError("augmented_hessian: grid mismatch");
    const double flip = (sign == Sign::negative) ? -1.0 : 1.0;
    TensorField out = hessian(u);
    const std::vector<GridField> du = gradient(u);
    const int d = g.dim;
    for (std::size_t at = 0; at < g.npoints; ++at) {
        double norm2 = 0.0;
        for (int a = 0; a < d; ++a) norm2 += du[static_cast<std::size_t>(a)][at] *
                                             du[static_cast<std::size_t>(a)][at];
        SymMat& m = out[at];
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b)
                m.add(a, b, flip * du[static_cast<std::size_t>(a)][at] *
                                du[static_cast<std::size_t>(b)][at]);
        m.add_scaled_identity(-flip * 0.5 * norm2);
        m += s[at];
    }
    return out;
}

/// Hessian of h in the conformally rescaled flat metric:
/// hess(h) + du (x) dh + dh (x) du - <du, dh> I. At u = 0 this is hess(h),
/// and it is the exact directional derivative of the positive augmented
/// Hessian of u in direction h.
[[nodiscard]] inline TensorField conformal_hessian(const GridField& h, const GridField& u) {
    const TorusGrid& g = h.grid;
    if (!g.same_shape(u.grid)) throw DomainError("conformal_hessian: grid mismatch");
    TensorField out = hessian(h);
    const std::vector<GridField> du = gradient(u);
    const std::vector<GridField> dh = gradient(h);
    const int d = g.dim;
    for (std::size_t at = 0; at < g.npoints; ++at) {
        double dot = 0.0;
        for (int a = 0; a < d; ++a) dot += du[static_cast<std::size_t>(a)][at] *
                                           dh[static_cast<std::size_t>(a)][at];
        SymMat& m = out[at];
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b)
                m.add(a, b, du[static_cast<std::size_t>(a)][at] * dh[static_cast<std::size_t>(b)][at] +
                                dh[static_cast<std::size_t>(a)][at] *
                                    du[static_cast<std::size_t>(b)][at]);
        m.add_scaled_identity(-dot);
    }
    return out;
}

} // namespace sigmak
