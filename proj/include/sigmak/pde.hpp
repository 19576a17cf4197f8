#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sigmak/errors.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/operators.hpp"
#include "sigmak/symfunc.hpp"

namespace sigmak {

/// Right-hand-side family psi(x, u) = f(x) * exp(a * u) with f > 0. The main
/// solver requires a > 0 (monotone right side); a < 0 appears only through
/// the normalized determinant paths.
struct PsiSpec {
    GridField f;
    double a = 1.0;

    [[nodiscard]] double eval(std::size_t at, double u) const {
        return f[at] * std::exp(a * u);
    }
};

/// Full problem data on a periodic grid: level k, background tensor S (in the
/// level-k cone pointwise), right-hand side, and orientation.
struct Problem {
    TorusGrid grid;
    int k = 1;
    TensorField S;
    PsiSpec psi;
    Sign sign = Sign::positive;
};

/// Checks the structural preconditions: shapes, k range, f > 0, a != 0, and
/// pointwise cone membership of S. Throws DomainError on violation.
inline void validate_problem(const Problem& p) {
    if (p.k < 1 || p.k > p.grid.dim)
        throw DomainError("validate_problem: level " + std::to_string(p.k) + " outside 1.." +
                          std::to_string(p.grid.dim));
    if (!p.grid.same_shape(p.S.grid) || !p.grid.same_shape(p.psi.f.grid))
        throw DomainError("validate_problem: field grids disagree");
    if (p.psi.a == 0.0) throw DomainError("validate_problem: exponent a must be nonzero");
    if (!(p.psi.f.min() > 0.0)) throw DomainError("validate_problem: f must be strictly positive");
    const ConeSpec cone{p.k, Sign::positive, 1.0};
    for (std::size_t i = 0; i < p.S.size(); ++i)
        if (!in_cone(p.S[i], cone))
            throw DomainError("validate_problem: S outside the level-" + std::to_string(p.k) +
                              " cone at point " + std::to_string(i));
}

namespace detail {

/// sigma_1(S) e^u, the right side of the blend's linear end.
[[nodiscard]] inline double linear_end_rhs(const Problem& p, std::size_t at, double u) {
    return p.S[at].trace() * std::exp(u);
}

} // namespace detail

/// Pointwise homotopy residual
///   t sigma_k^{1/k}(W) + (1-t) sigma_1(W) - t psi(x, u) - (1-t) sigma_1(S) e^u
/// where W is the orientation-appropriate augmented Hessian of u. Throws
/// NotAdmissible at the first point where W leaves the blended cone.
[[nodiscard]] inline GridField residual(const GridField& u, const Problem& p, double t) {
    if (t < 0.0 || t > 1.0) throw DomainError("residual: t outside [0, 1]");
    const TensorField w = augmented_hessian(u, p.S, p.sign);
    const ConeSpec cone{p.k, Sign::positive, t};
    GridField r(p.grid);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const BlendEval ev = evaluate_blend(w[i], cone);
        if (!ev.admissible)
            throw NotAdmissible("residual: iterate outside the blended cone at point " +
                                    std::to_string(i),
                                i, p.k);
        r[i] = ev.value - t * p.psi.eval(i, u[i]) - (1.0 - t) * detail::linear_end_rhs(p, i, u[i]);
    }
    return r;
}

/// Frozen-coefficient form of the residual's derivative at (u, t): the
/// second-order part contracts
///   C = t (1/k) sigma_k^{(1-k)/k}(W) T_{k-1}(W) + (1-t) I
/// against the conformal Hessian of the perturbation (taken at -u for the
/// negative orientation, matching the derivative of the flipped augmented
/// Hessian), and the zeroth-order part is -(t a psi + (1-t) sigma_1(S) e^u).
/// Building it validates admissibility once; apply() is then cheap enough for
/// matrix-free iterative solves.
class LinearizedOperator {
public:
    [[nodiscard]] static LinearizedOperator build(const GridField& u, const Problem& p, double t) {
        if (t < 0.0 || t > 1.0) throw DomainError("LinearizedOperator: t outside [0, 1]");
        LinearizedOperator op;
        op.grid_ = p.grid;
        op.flip_ = (p.sign == Sign::negative) ? -1.0 : 1.0;
        op.coeff_.assign(p.grid.npoints, SymMat(p.grid.dim));
        op.zeroth_.assign(p.grid.npoints, 0.0);
        op.grad_u_ = gradient(u);

        const TensorField w = augmented_hessian(u, p.S, p.sign);
        const ConeSpec cone{p.k, Sign::positive, t};
        const double kd = static_cast<double>(p.k);
        for (std::size_t i = 0; i < p.grid.npoints; ++i) {
            const BlendEval ev = evaluate_blend(w[i], cone);
            if (!ev.admissible)
                throw NotAdmissible("LinearizedOperator: iterate outside the blended cone at point " +
                                        std::to_string(i),
                                    i, p.k);
            SymMat c(p.grid.dim);
            if (ev.gamma_k && t > 0.0) {
                const double scale =
                    (p.k == 1) ? t : t * std::pow(ev.sigma_k, (1.0 - kd) / kd) / kd;
                c = newton_transform(w[i], p.k - 1) * scale;
            }
            if (t < 1.0) c.add_scaled_identity(1.0 - t);
            op.coeff_[i] = c;
            op.zeroth_[i] = -(t * p.psi.a * p.psi.eval(i, u[i]) +
                              (1.0 - t) * detail::linear_end_rhs(p, i, u[i]));
        }
        return op;
    }

    /// Applies the frozen linearization to a perturbation field.
    [[nodiscard]] GridField apply(const GridField& h) const {
        const TorusGrid& g = grid_;
        GridField out(g);
        const TensorField hess_h = hessian(h);
        const std::vector<GridField> dh = gradient(h);
        const int d = g.dim;
        for (std::size_t at = 0; at < g.npoints; ++at) {
            const SymMat& c = coeff_[at];
            double acc = 0.0;
            double dot = 0.0;
            double ctrace = 0.0;
            for (int a = 0; a < d; ++a) {
                const double dua = flip_ * grad_u_[static_cast<std::size_t>(a)][at];
                const double dha = dh[static_cast<std::size_t>(a)][at];
                dot += dua * dha;
                ctrace += c(a, a);
                for (int b = 0; b < d; ++b) {
                    const double dub = flip_ * grad_u_[static_cast<std::size_t>(b)][at];
                    const double dhb = dh[static_cast<std::size_t>(b)][at];
                    acc += c(a, b) * (hess_h[at](a, b) + dua * dhb + dha * dub);
                }
            }
            acc -= ctrace * dot;
            out[at] = acc + zeroth_[at] * h[at];
        }
        return out;
    }

    /// Diagonal of the operator in the standard basis: second-difference
    /// center weights plus the zeroth-order coefficient. Used as a
    /// preconditioner.
    [[nodiscard]] GridField diagonal() const {
        const TorusGrid& g = grid_;
        GridField dg(g);
        for (std::size_t at = 0; at < g.npoints; ++at) {
            double v = zeroth_[at];
            for (int a = 0; a < g.dim; ++a) {
                const double h = g.spacing[static_cast<std::size_t>(a)];
                v += coeff_[at](a, a) * (-2.0 / (h * h));
            }
            dg[at] = v;
        }
        return dg;
    }

    [[nodiscard]] const TorusGrid& grid() const noexcept { return grid_; }

private:
    TorusGrid grid_;
    double flip_ = 1.0;
    std::vector<SymMat> coeff_;
    std::vector<double> zeroth_;
    std::vector<GridField> grad_u_;
};

/// Derivative of the homotopy residual at u in direction h, frozen at (u, t).
/// Matches central differences of residual() to truncation order.
[[nodiscard]] inline GridField linearize_apply(const GridField& u, const GridField& h,
                                               const Problem& p, double t) {
    return LinearizedOperator::build(u, p, t).apply(h);
}

struct SegmentFailure {
    double s = 0.0;
    std::size_t point = 0;
};

/// Tests admissibility of the exponential segment between two positive
/// fields: u_s = log((1-s) w0 + s w1) must have its augmented Hessian in the
/// pure level-k cone at every grid point for every sampled s. On failure
/// reports the first failing (s, point).
[[nodiscard]] inline bool admissible_segment_test(const GridField& w0, const GridField& w1,
                                                  const Problem& p, int samples,
                                                  SegmentFailure* failure = nullptr) {
    if (samples < 2) throw DomainError("admissible_segment_test: need at least 2 samples");
    if (!(w0.min() > 0.0) || !(w1.min() > 0.0))
        throw DomainError("admissible_segment_test: fields must be strictly positive");
    const ConeSpec cone{p.k, Sign::positive, 1.0};
    GridField us(p.grid);
    for (int is = 0; is < samples; ++is) {
        const double s = static_cast<double>(is) / (samples - 1);
        for (std::size_t i = 0; i < us.size(); ++i)
            us[i] = std::log((1.0 - s) * w0[i] + s * w1[i]);
        const TensorField w = augmented_hessian(us, p.S, p.sign);
        for (std::size_t i = 0; i < us.size(); ++i) {
            if (!in_cone(w[i], cone)) {
                if (failure != nullptr) *failure = {s, i};
                return false;
            }
        }
    }
    return true;
}

/// Residual of the orientation-flipped equation sigma_k^{1/k}(W) = f e^{a u}
/// at t = 1; the gradient-term signs are absorbed into W by the negative
/// augmented Hessian.
[[nodiscard]] inline GridField negative_residual(const GridField& u, const Problem& p) {
    Problem q = p;
    q.sign = Sign::negative;
    return residual(u, q, 1.0);
}

} // namespace sigmak
