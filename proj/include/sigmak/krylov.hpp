#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sigmak/errors.hpp"

namespace sigmak {

struct LinearSolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

namespace detail {

[[nodiscard]] inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

[[nodiscard]] inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

} // namespace detail

/// Stabilized biconjugate-gradient solve of A x = b for a general
/// nonsymmetric operator, matrix-free: `apply` maps a vector to A v, and
/// `inv_diag` is the reciprocal diagonal used as preconditioner. Starts from
/// x = 0, stops when the true residual 2-norm falls below tol * |b|. All
/// reductions are sequential, so results are bit-reproducible. Breakdown
/// restarts the shadow residual; the final iterate is returned either way.
template <class ApplyFn>
[[nodiscard]] LinearSolveStats bicgstab(const ApplyFn& apply, const std::vector<double>& b,
                                        std::vector<double>& x,
                                        const std::vector<double>& inv_diag, double tol,
                                        int max_iters) {
    const std::size_t n = b.size();
    x.assign(n, 0.0);
    const double bnorm = detail::norm2(b);
    LinearSolveStats stats;
    if (bnorm == 0.0) {
        stats.converged = true;
        return stats;
    }
    const double target = tol * bnorm;
    const double breakdown = 1e-300;

    std::vector<double> r = b; // r = b - A*0
    std::vector<double> rhat = r;
    std::vector<double> p(n, 0.0), v(n, 0.0), phat(n), s(n), shat(n), t(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    for (int it = 1; it <= max_iters; ++it) {
        double rho_new = detail::dot(rhat, r);
        if (std::abs(rho_new) < breakdown) {
            rhat = r;
            rho_new = detail::dot(r, r);
            if (rho_new < breakdown) break;
            std::fill(p.begin(), p.end(), 0.0);
            std::fill(v.begin(), v.end(), 0.0);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
        }
        const double beta = (rho_new / rho) * (alpha / omega);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        for (std::size_t i = 0; i < n; ++i) phat[i] = p[i] * inv_diag[i];
        v = apply(phat);
        const double rhat_v = detail::dot(rhat, v);
        if (std::abs(rhat_v) < breakdown) break;
        alpha = rho_new / rhat_v;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (detail::norm2(s) <= target) {
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
            stats.iterations = it;
            stats.rel_residual = detail::norm2(s) / bnorm;
            stats.converged = true;
            return stats;
        }
        for (std::size_t i = 0; i < n; ++i) shat[i] = s[i] * inv_diag[i];
        t = apply(shat);
        const double tt = detail::dot(t, t);
        if (tt < breakdown) break;
        omega = detail::dot(t, s) / tt;
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i] + omega * shat[i];
        for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
        stats.iterations = it;
        if (detail::norm2(r) <= target) {
            stats.rel_residual = detail::norm2(r) / bnorm;
            stats.converged = true;
            return stats;
        }
        if (std::abs(omega) < breakdown) break;
        rho = rho_new;
    }
    stats.rel_residual = detail::norm2(r) / bnorm;
    return stats;
}

} // namespace sigmak
