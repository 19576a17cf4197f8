#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sigmak/errors.hpp"
#include "sigmak/estimates.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/krylov.hpp"
#include "sigmak/operators.hpp"
#include "sigmak/pde.hpp"
#include "sigmak/symfunc.hpp"

namespace sigmak {

struct SolverOptions {
    double residual_tol = 1e-8;      // sup-norm target for nonlinear residuals
    int max_newton_iters = 50;
    double line_search_shrink = 0.5;
    double min_step = 1e-10;         // line-search floor
    double dt_initial = 1.0 / 16.0;
    double dt_min = 1.0 / 1024.0;
    double linear_tol = 1e-10;       // relative 2-norm target for linear solves
    int linear_max_iters = 0;        // 0 selects 10 * sqrt(unknowns)

    [[nodiscard]] int effective_linear_max_iters(std::size_t unknowns) const {
        if (linear_max_iters > 0) return linear_max_iters;
        return static_cast<int>(10.0 * std::sqrt(static_cast<double>(unknowns))) + 1;
    }
};

inline void validate_options(const SolverOptions& o) {
    if (!(o.residual_tol > 0.0) || o.max_newton_iters < 1 || !(o.line_search_shrink > 0.0) ||
        !(o.line_search_shrink < 1.0) || !(o.min_step > 0.0) || !(o.dt_initial > 0.0) ||
        !(o.dt_min > 0.0) || !(o.linear_tol > 0.0) || o.linear_max_iters < 0)
        throw DomainError("SolverOptions: all tolerances and budgets must be positive");
    if (o.dt_min > o.dt_initial || o.dt_initial > 1.0)
        throw DomainError("SolverOptions: need dt_min <= dt_initial <= 1");
}

struct NewtonResult {
    GridField u;
    int iterations = 0;
    double residual_sup = 0.0;
};

namespace detail {

[[nodiscard]] inline std::vector<double> reciprocal_guarded(const GridField& d) {
    std::vector<double> inv(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double v = d[i];
        inv[i] = (std::abs(v) > 1e-14) ? 1.0 / v : 1.0;
    }
    return inv;
}

} // namespace detail

/// Damped Newton on the homotopy residual at fixed t. Each step solves the
/// frozen linearization matrix-free and backtracks by halving until the
/// sup-norm residual strictly decreases and the iterate stays admissible.
[[nodiscard]] inline NewtonResult newton_solve(const Problem& p, double t, const GridField& u0,
                                               const SolverOptions& opts) {
    validate_options(opts);
    NewtonResult res;
    res.u = u0;
    GridField r = residual(res.u, p, t); // throws NotAdmissible if u0 is bad
    double rsup = r.sup_norm();
    const int lin_iters = opts.effective_linear_max_iters(p.grid.npoints);

    for (int iter = 1; iter <= opts.max_newton_iters; ++iter) {
        if (rsup <= opts.residual_tol) {
            res.iterations = iter - 1;
            res.residual_sup = rsup;
            return res;
        }
        const LinearizedOperator op = LinearizedOperator::build(res.u, p, t);
        const std::vector<double> inv_diag = detail::reciprocal_guarded(op.diagonal());
        std::vector<double> rhs(r.values);
        for (double& v : rhs) v = -v;
        std::vector<double> delta;
        GridField hwork(p.grid);
        auto apply = [&](const std::vector<double>& v) {
            hwork.values = v;
            return op.apply(hwork).values;
        };
        (void)bicgstab(apply, rhs, delta, inv_diag, opts.linear_tol, lin_iters);

        double alpha = 1.0;
        bool accepted = false;
        bool cone_blocked = false;
        while (alpha >= opts.min_step) {
            GridField trial = res.u;
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += alpha * delta[i];
            try {
                GridField rt = residual(trial, p, t);
                const double rtsup = rt.sup_norm();
                if (rtsup < rsup) {
                    res.u = std::move(trial);
                    r = std::move(rt);
                    rsup = rtsup;
                    accepted = true;
                    break;
                }
                cone_blocked = false;
            } catch (const NotAdmissible&) {
                cone_blocked = true;
            }
            alpha *= opts.line_search_shrink;
        }
        if (!accepted) {
            if (cone_blocked)
                throw NotAdmissible("newton_solve: no admissible backtracked step at t = " +
                                    std::to_string(t));
            throw NoConvergence("newton_solve: line search stalled at residual " +
                                    std::to_string(rsup),
                                iter, rsup);
        }
    }
    if (rsup <= opts.residual_tol) {
        res.iterations = opts.max_newton_iters;
        res.residual_sup = rsup;
        return res;
    }
    throw NoConvergence("newton_solve: residual " + std::to_string(rsup) + " above tolerance after " +
                            std::to_string(opts.max_newton_iters) + " iterations",
                        opts.max_newton_iters, rsup);
}

/// One accepted continuation state. `dt` is the step that reached this state
/// (dt_initial for the seed state); `u` is stored for warm restarts and
/// audits.
struct ContinuationState {
    double t = 0.0;
    double dt = 0.0;
    int newton_iters = 0;
    double residual_sup = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    double sigma_km1_max = 0.0;
    double hess_eig_max = 0.0;
    GridField u;
};

struct ContinuationResult {
    GridField u;
    std::vector<ContinuationState> trace;
};

namespace detail {

[[nodiscard]] inline ContinuationState make_state(const Problem& p, double t, double dt,
                                                  int newton_iters, double residual_sup,
                                                  const GridField& u) {
    ContinuationState st;
    st.t = t;
    st.dt = dt;
    st.newton_iters = newton_iters;
    st.residual_sup = residual_sup;
    st.u_min = u.min();
    st.u_max = u.max();
    const Diagnostics d = diagnostics(u, p);
    st.sigma_km1_max = d.sigma_km1_max;
    st.hess_eig_max = d.shifted_hess_eig_max;
    st.u = u;
    return st;
}

/// Step-size controller: halve on failure, double on success, capped at
/// dt_initial.
[[nodiscard]] inline double next_dt(double dt_used, const SolverOptions& opts) {
    return std::min(2.0 * dt_used, opts.dt_initial);
}

} // namespace detail

/// Homotopy continuation from the trivial blend (t = 0, u = 0) to t = 1,
/// warm-starting Newton at each step and shrinking the step on failure.
/// `t_start`, `u_start`, `dt_start` allow replay from a stored state. When an
/// `observer` is given every accepted state is mirrored into it, so a partial
/// trace survives a thrown ContinuationStalled.
[[nodiscard]] inline ContinuationResult continuation_solve_from(
    const Problem& p, const SolverOptions& opts, double t_start, const GridField& u_start,
    double dt_start, std::vector<ContinuationState>* observer = nullptr) {
    validate_options(opts);
    if (p.psi.a <= 0.0)
        throw DomainError("continuation_solve: homotopy path requires a > 0");
    ContinuationResult out;
    const auto push = [&](ContinuationState st) {
        if (observer != nullptr) observer->push_back(st);
        out.trace.push_back(std::move(st));
    };
    double t = t_start;
    GridField u = u_start;
    {
        const GridField r0 = residual(u, p, t); // admissibility gate at the seed
        push(detail::make_state(p, t, dt_start, 0, r0.sup_norm(), u));
    }
    double dt = dt_start;
    while (t < 1.0) {
        const double t_next = std::min(1.0, t + dt);
        bool ok = false;
        NewtonResult nr;
        try {
            nr = newton_solve(p, t_next, u, opts);
            ok = true;
        } catch (const NoConvergence&) {
        } catch (const NotAdmissible&) {
        }
        if (ok) {
            u = std::move(nr.u);
            t = t_next;
            push(detail::make_state(p, t, dt, nr.iterations, nr.residual_sup, u));
            dt = detail::next_dt(dt, opts);
        } else {
            dt *= 0.5;
            if (dt < opts.dt_min)
                throw ContinuationStalled("continuation_solve: step underflow at t = " +
                                              std::to_string(t),
                                          t);
        }
    }
    out.u = std::move(u);
    return out;
}

[[nodiscard]] inline ContinuationResult continuation_solve(
    const Problem& p, const SolverOptions& opts,
    std::vector<ContinuationState>* observer = nullptr) {
    validate_problem(p);
    return continuation_solve_from(p, opts, 0.0, GridField(p.grid, 0.0), opts.dt_initial, observer);
}

/// Resumes continuation from a stored state, reproducing the remainder of the
/// original trace (same controller state the original run had after accepting
/// that state).
[[nodiscard]] inline ContinuationResult continuation_replay(const Problem& p,
                                                            const SolverOptions& opts,
                                                            const ContinuationState& st) {
    return continuation_solve_from(p, opts, st.t, st.u, detail::next_dt(st.dt, opts));
}

/// Determinant-equation data with the mean normalization made explicit:
/// det(W + S_t) = f^{nt} * extra * e^{-n <w>}, S_t = (1-t) lambda_max I + t S,
/// with <w> the integral of w over the cell.
struct NormalizedProblem {
    TorusGrid grid;
    int n = 2;            // level = grid dimension
    TensorField S;        // unblended background, positive definite
    GridField f;          // strictly positive
    double lambda_max = 0.0;
    double volume = 0.0;
    double mean_weight = 0.0; // coupling coefficient n in the e^{-n <w>} factor
};

[[nodiscard]] inline NormalizedProblem make_normalized(const Problem& p) {
    if (p.k != p.grid.dim)
        throw DomainError("make_normalized: determinant paths need k equal to the dimension");
    if (p.sign != Sign::positive)
        throw DomainError("make_normalized: determinant paths are positive-orientation only");
    if (!(p.psi.f.min() > 0.0)) throw DomainError("make_normalized: f must be strictly positive");
    const ConeSpec cone{p.k, Sign::positive, 1.0};
    for (std::size_t i = 0; i < p.S.size(); ++i)
        if (!in_cone(p.S[i], cone))
            throw DomainError("make_normalized: S not positive definite at point " +
                              std::to_string(i));
    NormalizedProblem np;
    np.grid = p.grid;
    np.n = p.k;
    np.S = p.S;
    np.f = p.psi.f;
    np.lambda_max = max_top_eigenvalue(p.S);
    np.volume = p.grid.volume();
    np.mean_weight = static_cast<double>(p.k);
    return np;
}

[[nodiscard]] inline TensorField blend_background(const NormalizedProblem& np, double t) {
    TensorField st(np.grid, np.grid.dim);
    SymMat iso = SymMat::identity(np.grid.dim) * ((1.0 - t) * np.lambda_max);
    for (std::size_t i = 0; i < st.size(); ++i) {
        st[i] = np.S[i] * t;
        st[i] += iso;
    }
    return st;
}

/// Residual of the normalized determinant equation at blend t with an extra
/// pointwise right-hand factor (1 for the plain normalized path; the frozen
/// exponential for fixed-point outer iterations).
[[nodiscard]] inline GridField normalized_residual(const GridField& w, const NormalizedProblem& np,
                                                   double t, const GridField& extra) {
    const TensorField st = blend_background(np, t);
    const TensorField wbar = augmented_hessian(w, st, Sign::positive);
    const ConeSpec cone{np.n, Sign::positive, 1.0};
    const double nt = np.mean_weight * t;
    const double mean_factor = std::exp(-np.mean_weight * w.integral());
    GridField r(np.grid);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!in_cone(wbar[i], cone))
            throw NotAdmissible("normalized_residual: iterate outside the positive cone at point " +
                                    std::to_string(i),
                                i, np.n);
        r[i] = sigma_mat(wbar[i], np.n) - std::pow(np.f[i], nt) * extra[i] * mean_factor;
    }
    return r;
}

/// Damped Newton for the normalized determinant equation. The linearization
/// is the frozen determinant derivative plus the rank-one mean coupling
/// n * rhs(x) * <h>, solved matrix-free.
[[nodiscard]] inline NewtonResult solve_normalized(const NormalizedProblem& np, double t,
                                                   const GridField& extra, const GridField& u0,
                                                   const SolverOptions& opts) {
    validate_options(opts);
    const TensorField st = blend_background(np, t);
    NewtonResult res;
    res.u = u0;
    GridField r = normalized_residual(res.u, np, t, extra);
    double rsup = r.sup_norm();
    const int lin_iters = opts.effective_linear_max_iters(np.grid.npoints);
    const double nt = np.mean_weight * t;
    const double cellvol = np.grid.cell_volume();

    for (int iter = 1; iter <= opts.max_newton_iters; ++iter) {
        if (rsup <= opts.residual_tol) {
            res.iterations = iter - 1;
            res.residual_sup = rsup;
            return res;
        }
        // Frozen coefficients: T_{n-1}(W) against the conformal Hessian plus
        // the rank-one term; diagonal carries the stencil centers.
        const TensorField wbar = augmented_hessian(res.u, st, Sign::positive);
        std::vector<SymMat> tn(np.grid.npoints, SymMat(np.grid.dim));
        GridField rhs_coeff(np.grid);
        const double mean_factor = std::exp(-np.mean_weight * res.u.integral());
        for (std::size_t i = 0; i < np.grid.npoints; ++i) {
            tn[i] = newton_transform(wbar[i], np.n - 1);
            rhs_coeff[i] = np.mean_weight * std::pow(np.f[i], nt) * extra[i] * mean_factor;
        }
        const std::vector<GridField> grad_u = gradient(res.u);

        GridField diag(np.grid);
        for (std::size_t i = 0; i < np.grid.npoints; ++i) {
            double v = rhs_coeff[i] * cellvol;
            for (int a = 0; a < np.grid.dim; ++a) {
                const double h = np.grid.spacing[static_cast<std::size_t>(a)];
                v += tn[i](a, a) * (-2.0 / (h * h));
            }
            diag[i] = v;
        }
        const std::vector<double> inv_diag = detail::reciprocal_guarded(diag);

        GridField hwork(np.grid);
        auto apply = [&](const std::vector<double>& v) {
            hwork.values = v;
            const TensorField ch = conformal_hessian(hwork, res.u);
            const double mean_h = hwork.integral();
            GridField out(np.grid);
            for (std::size_t i = 0; i < np.grid.npoints; ++i)
                out[i] = tn[i].dot(ch[i]) + rhs_coeff[i] * mean_h;
            return out.values;
        };
        std::vector<double> rhs(r.values);
        for (double& v : rhs) v = -v;
        std::vector<double> delta;
        (void)bicgstab(apply, rhs, delta, inv_diag, opts.linear_tol, lin_iters);

        double alpha = 1.0;
        bool accepted = false;
        bool cone_blocked = false;
        while (alpha >= opts.min_step) {
            GridField trial = res.u;
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += alpha * delta[i];
            try {
                GridField rt = normalized_residual(trial, np, t, extra);
                const double rtsup = rt.sup_norm();
                if (rtsup < rsup) {
                    res.u = std::move(trial);
                    r = std::move(rt);
                    rsup = rtsup;
                    accepted = true;
                    break;
                }
                cone_blocked = false;
            } catch (const NotAdmissible&) {
                cone_blocked = true;
            }
            alpha *= opts.line_search_shrink;
        }
        if (!accepted) {
            if (cone_blocked)
                throw NotAdmissible("solve_normalized: no admissible backtracked step");
            throw NoConvergence("solve_normalized: line search stalled at residual " +
                                    std::to_string(rsup),
                                iter, rsup);
        }
    }
    if (rsup <= opts.residual_tol) {
        res.iterations = opts.max_newton_iters;
        res.residual_sup = rsup;
        return res;
    }
    throw NoConvergence("solve_normalized: residual " + std::to_string(rsup) +
                            " above tolerance after " + std::to_string(opts.max_newton_iters) +
                            " iterations",
                        opts.max_newton_iters, rsup);
}

/// Continuation in t for the normalized determinant equation, seeded with the
/// exact constant solution of the isotropic blend at t = 0.
[[nodiscard]] inline ContinuationResult normalized_continuation(
    const NormalizedProblem& np, const SolverOptions& opts, const GridField& extra,
    std::vector<ContinuationState>* observer = nullptr) {
    validate_options(opts);
    ContinuationResult out;
    const auto push = [&](ContinuationState st) {
        if (observer != nullptr) observer->push_back(st);
        out.trace.push_back(std::move(st));
    };
    double t = 0.0;
    GridField u(np.grid, -std::log(np.lambda_max) / np.volume);
    const NewtonResult polish = solve_normalized(np, 0.0, extra, u, opts);
    u = polish.u;
    Problem audit_p;
    audit_p.grid = np.grid;
    audit_p.k = np.n;
    audit_p.S = np.S;
    audit_p.psi = PsiSpec{np.f, 1.0};
    audit_p.sign = Sign::positive;
    push(detail::make_state(audit_p, 0.0, opts.dt_initial, polish.iterations,
                            polish.residual_sup, u));
    double dt = opts.dt_initial;
    while (t < 1.0) {
        const double t_next = std::min(1.0, t + dt);
        bool ok = false;
        NewtonResult nr;
        try {
            nr = solve_normalized(np, t_next, extra, u, opts);
            ok = true;
        } catch (const NoConvergence&) {
        } catch (const NotAdmissible&) {
        }
        if (ok) {
            u = std::move(nr.u);
            t = t_next;
            push(detail::make_state(audit_p, t, dt, nr.iterations, nr.residual_sup, u));
            dt = detail::next_dt(dt, opts);
        } else {
            dt *= 0.5;
            if (dt < opts.dt_min)
                throw ContinuationStalled("normalized_continuation: step underflow at t = " +
                                              std::to_string(t),
                                          t);
        }
    }
    out.u = std::move(u);
    return out;
}

struct FixedPointResult {
    GridField u; // re-centered so the unnormalized equation holds
    std::vector<ContinuationState> trace; // one settled record per scheduled t
};

/// Fixed-point driver for the unnormalized determinant equation with
/// right-hand side f e^{-2u}: at each scheduled t the map freezes the
/// exponential at the previous iterate, solves the normalized equation, and
/// repeats until the sup gap is below tolerance. The t = 1 limit solves the
/// mean-normalized form; adding <u>/2 removes the normalization exactly.
[[nodiscard]] inline FixedPointResult fixed_point_solve(
    const Problem& p, const std::vector<double>& t_schedule, const SolverOptions& opts,
    std::vector<ContinuationState>* observer = nullptr) {
    validate_options(opts);
    validate_problem(p);
    if (p.psi.a != -2.0)
        throw DomainError("fixed_point_solve: right-hand side must have exponent a = -2");
    const NormalizedProblem np = make_normalized(Problem{p.grid, p.k, p.S, {p.psi.f, 1.0}, p.sign});
    (void)harnack_gap(p.S, p.grid.diameter()); // feasibility gate

    std::vector<double> schedule = t_schedule;
    if (schedule.empty()) schedule = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (double t : schedule)
        if (t < 0.0 || t > 1.0) throw DomainError("fixed_point_solve: schedule values outside [0, 1]");

    const int max_outer = 200;
    FixedPointResult out;
    GridField u(np.grid, -std::log(np.lambda_max) / np.volume);
    GridField extra(np.grid, 1.0);
    double t_prev = 0.0;
    for (double t : schedule) {
        const double w = 2.0 * np.mean_weight * t; // exponent on the frozen iterate
        int inner_total = 0;
        double gap = 0.0;
        bool settled = false;
        for (int m = 1; m <= max_outer; ++m) {
            for (std::size_t i = 0; i < extra.size(); ++i) extra[i] = std::exp(-w * u[i]);
            const NewtonResult nr = solve_normalized(np, t, extra, u, opts);
            inner_total += nr.iterations;
            gap = sup_distance(nr.u, u);
            u = nr.u;
            if (gap <= opts.residual_tol) {
                ContinuationState st = detail::make_state(p, t, t - t_prev, inner_total, gap, u);
                if (observer != nullptr) observer->push_back(st);
                out.trace.push_back(std::move(st));
                settled = true;
                break;
            }
        }
        if (!settled)
            throw FixedPointStalled("fixed_point_solve: outer iteration not contracting at t = " +
                                        std::to_string(t),
                                    max_outer, gap);
        t_prev = t;
    }
    const double recenter = 0.5 * u.integral();
    u.shift(recenter);
    out.u = std::move(u);
    return out;
}

} // namespace sigmak
