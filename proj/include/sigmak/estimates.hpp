#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "sigmak/errors.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/operators.hpp"
#include "sigmak/pde.hpp"
#include "sigmak/symfunc.hpp"

namespace sigmak {

/// Strictness margin added to maximum-principle bounds so that strict
/// inequalities remain assertable in floating point.
inline constexpr double kBoundMargin = 1e-6;

/// Maximum-principle solution bounds. For increasing right-hand sides
/// (a > 0) the bounds contain the solution pointwise; for decreasing ones
/// (a < 0) the same extremum argument only yields the one-sided pair
/// sup u > lower and inf u < upper, recorded by two_sided = false.
struct C0Bounds {
    double lower = 0.0;
    double upper = 0.0;
    bool two_sided = true;
};

namespace detail {

/// min / max over the grid of sigma_k^{1/k}(S) / f. Throws DomainError if S
/// leaves the level-k cone anywhere.
inline void ratio_extremes(const Problem& p, double& rmin, double& rmax) {
    const ConeSpec cone{p.k, Sign::positive, 1.0};
    rmin = 0.0;
    rmax = 0.0;
    for (std::size_t i = 0; i < p.S.size(); ++i) {
        double root = 0.0;
        try {
            root = sigma_k_root(p.S[i], cone);
        } catch (const NotAdmissible&) {
            throw DomainError("c0_bounds: S outside the level-" + std::to_string(p.k) +
                              " cone at point " + std::to_string(i));
        }
        const double ratio = root / p.psi.f[i];
        if (i == 0) {
            rmin = ratio;
            rmax = ratio;
        } else {
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
        }
    }
}

} // namespace detail

/// Solution bounds from the extremum argument: at an interior maximum the
/// augmented Hessian is dominated by S, so psi(x, u_max) cannot exceed
/// sigma_k^{1/k}(S); the minimum gives the mirror inequality. Solving
/// f e^{a u} = sigma_k^{1/k}(S) for u yields ln(ratio) / a at the extremes.
[[nodiscard]] inline C0Bounds c0_bounds(const Problem& p) {
    double rmin = 0.0;
    double rmax = 0.0;
    detail::ratio_extremes(p, rmin, rmax);
    const double a = p.psi.a;
    C0Bounds b;
    if (a > 0.0) {
        b.lower = std::log(rmin) / a - kBoundMargin;
        b.upper = std::log(rmax) / a + kBoundMargin;
        b.two_sided = true;
    } else {
        b.lower = std::log(rmax) / a - kBoundMargin;
        b.upper = std::log(rmin) / a + kBoundMargin;
        b.two_sided = false;
    }
    return b;
}

/// Bounds valid along the whole homotopy path, not only at its end: at each
/// blend parameter the extremum argument compares a pointwise ratio that
/// interpolates monotonically between 1 (pure trace equation, solution 0) and
/// sigma_k^{1/k}(S) / f, so the path stays inside the hull of the end bounds
/// and 0.
[[nodiscard]] inline C0Bounds homotopy_c0_bounds(const Problem& p) {
    C0Bounds b = c0_bounds(p);
    b.lower = std::min(b.lower, -kBoundMargin);
    b.upper = std::max(b.upper, kBoundMargin);
    return b;
}

/// One-sided bounds for the mean-normalized determinant equation
/// sigma_n^{1/n}(W) = f e^{-<u>}: the extremum argument pins the integral <u>
/// between -ln of the ratio extremes, and sup u >= <u> / volume >= inf u.
[[nodiscard]] inline C0Bounds normalized_c0_bounds(const Problem& p, double volume) {
    double rmin = 0.0;
    double rmax = 0.0;
    detail::ratio_extremes(p, rmin, rmax);
    C0Bounds b;
    b.lower = -std::log(rmax) / volume - kBoundMargin;
    b.upper = -std::log(rmin) / volume + kBoundMargin;
    b.two_sided = false;
    return b;
}

struct C0Report {
    bool ok = false;
    bool two_sided = true;
    double lower = 0.0;
    double upper = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    double margin_lower = 0.0; // min over modes of distance into the bound
    double margin_upper = 0.0;
    std::size_t worst_point = 0;
};

/// Checks the bound semantics: pointwise containment for two-sided bounds,
/// sup u > lower and inf u < upper for one-sided ones. Strict inequalities.
[[nodiscard]] inline C0Report verify_c0(const GridField& u, const C0Bounds& b) {
    C0Report rep;
    rep.two_sided = b.two_sided;
    rep.lower = b.lower;
    rep.upper = b.upper;
    rep.u_min = u.min();
    rep.u_max = u.max();
    if (b.two_sided) {
        rep.margin_lower = rep.u_min - b.lower;
        rep.margin_upper = b.upper - rep.u_max;
        rep.ok = rep.margin_lower > 0.0 && rep.margin_upper > 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u[i] <= b.lower || u[i] >= b.upper) {
                rep.worst_point = i;
                break;
            }
    } else {
        rep.margin_lower = rep.u_max - b.lower; // sup u above the floor
        rep.margin_upper = b.upper - rep.u_min; // inf u below the ceiling
        rep.ok = rep.margin_lower > 0.0 && rep.margin_upper > 0.0;
    }
    return rep;
}

/// Barrier profile phi(s) = c1 (c2 - s)^p (positive mode) or c1 (c2 + s)^p
/// (negative mode) with the differential inequalities needed by the
/// second-derivative estimates verified on the whole interval.
struct PhiConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double p = 0.0;
    bool positive_mode = true;
};

struct PhiReport {
    bool ok = false;
    double worst_first = 0.0;  // min over samples of the signed first-derivative margin
    double worst_second = 0.0; // min over samples of phi'' - phi'^2 +/- phi'
};

/// phi, phi', phi'' in closed form.
[[nodiscard]] inline double phi_value(const PhiConstants& c, double s) {
    const double tau = c.positive_mode ? (c.c2 - s) : (c.c2 + s);
    return c.c1 * std::pow(tau, c.p);
}

[[nodiscard]] inline double phi_d1(const PhiConstants& c, double s) {
    const double tau = c.positive_mode ? (c.c2 - s) : (c.c2 + s);
    const double inner = c.positive_mode ? -1.0 : 1.0;
    return inner * c.c1 * c.p * std::pow(tau, c.p - 1.0);
}

[[nodiscard]] inline double phi_d2(const PhiConstants& c, double s) {
    const double tau = c.positive_mode ? (c.c2 - s) : (c.c2 + s);
    return c.c1 * c.p * (c.p - 1.0) * std::pow(tau, c.p - 2.0);
}

/// Samples the mode's two inequalities over [lower, upper]:
/// positive mode: phi' < 0 and phi'' - phi'^2 + phi' > 0;
/// negative mode: phi' > 0 and phi'' - phi'^2 - phi' > 0.
[[nodiscard]] inline PhiReport phi_inequality_report(const PhiConstants& c, double lower,
                                                     double upper, int samples = 10000) {
    PhiReport rep;
    rep.worst_first = std::numeric_limits<double>::infinity();
    rep.worst_second = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double s = lower + (upper - lower) * static_cast<double>(i) / (samples - 1);
        const double d1 = phi_d1(c, s);
        const double d2 = phi_d2(c, s);
        const double first = c.positive_mode ? -d1 : d1;
        const double second = c.positive_mode ? (d2 - d1 * d1 + d1) : (d2 - d1 * d1 - d1);
        rep.worst_first = std::min(rep.worst_first, first);
        rep.worst_second = std::min(rep.worst_second, second);
    }
    rep.ok = rep.worst_first > 0.0 && rep.worst_second > 0.0;
    return rep;
}

/// Constructs barrier constants for the given bounds. Picks the smallest
/// integer p >= 2 whose admissible window (upper, lower + p - 1 - 1/p) is
/// nonempty, centers c2 in it, and sets c1 = 1 / (p^2 (c2 - lower)^p) so the
/// composite inequality holds with slack across the interval. The negative
/// mode applies the same recipe to the reflected interval (-upper, -lower).
/// The returned constants are re-verified by dense sampling.
[[nodiscard]] inline PhiConstants phi_constants(const C0Bounds& b, bool positive_mode) {
    const double lo = positive_mode ? b.lower : -b.upper;
    const double hi = positive_mode ? b.upper : -b.lower;
    int p = 2;
    while (static_cast<double>(p) - 1.0 - 1.0 / p <= hi - lo) ++p;
    const double window_hi = lo + static_cast<double>(p) - 1.0 - 1.0 / p;
    PhiConstants c;
    c.p = static_cast<double>(p);
    c.c2 = 0.5 * (hi + window_hi);
    c.c1 = 1.0 / (c.p * c.p * std::pow(c.c2 - lo, c.p));
    c.positive_mode = positive_mode;
    const PhiReport rep = phi_inequality_report(c, b.lower, b.upper);
    if (!rep.ok)
        throw ConvergenceFailure("phi_constants: constructed barrier failed verification");
    return c;
}

/// Harnack-type oscillation gap 2 ln cos(D sqrt(lambda_max / 2)) where
/// lambda_max is the largest eigenvalue of S over the grid. Defined only in
/// the feasible regime lambda_max * D^2 < pi^2 / 2.
[[nodiscard]] inline double max_top_eigenvalue(const TensorField& s) {
    double m = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double top = eigen_sym(s[i]).values.front();
        m = (i == 0) ? top : std::max(m, top);
    }
    return m;
}

[[nodiscard]] inline double harnack_gap(const TensorField& s, double diameter) {
    if (!(diameter > 0.0)) throw DomainError("harnack_gap: diameter must be positive");
    const double lam = max_top_eigenvalue(s);
    const double threshold = std::numbers::pi * std::numbers::pi / 2.0;
    if (!(lam * diameter * diameter < threshold))
        throw HarnackInfeasible("harnack_gap: lambda_max * D^2 = " +
                                    std::to_string(lam * diameter * diameter) +
                                    " not below pi^2/2",
                                lam, diameter);
    return 2.0 * std::log(std::cos(diameter * std::sqrt(lam / 2.0)));
}

struct HarnackReport {
    bool ok = false;
    double gap = 0.0;
    double sup_u = 0.0;
    double inf_u = 0.0;
    double slack = 0.0; // inf u - sup u - gap, positive when the bound holds
};

/// Verifies gap + sup u < inf u for a determinant-equation solution.
[[nodiscard]] inline HarnackReport verify_harnack(const GridField& u, const TensorField& s,
                                                  double diameter) {
    HarnackReport rep;
    rep.gap = harnack_gap(s, diameter);
    rep.sup_u = u.max();
    rep.inf_u = u.min();
    rep.slack = rep.inf_u - rep.sup_u - rep.gap;
    rep.ok = rep.slack > 0.0;
    return rep;
}

struct ConvexityReport {
    bool ok = false;
    double min_eigenvalue = 0.0;
    std::size_t worst_point = 0;
    std::size_t failed_points = 0;
};

/// Checks the convexity tensor of the square-root substitution v = e^{u/2}:
/// hess(v) + (1/2) v S must be positive definite at every grid point.
[[nodiscard]] inline ConvexityReport verify_v_convexity(const GridField& u, const TensorField& s) {
    GridField v(u.grid);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(0.5 * u[i]);
    const TensorField hv = hessian(v);
    ConvexityReport rep;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        SymMat m = hv[i] + s[i] * (0.5 * v[i]);
        const double mineig = eigen_sym(m).values.back();
        if (mineig < rep.min_eigenvalue) {
            rep.min_eigenvalue = mineig;
            rep.worst_point = i;
        }
        if (!(mineig > 0.0)) ++rep.failed_points;
    }
    rep.ok = rep.failed_points == 0;
    return rep;
}

struct Diagnostics {
    double grad_sup = 0.0;          // sup |grad u|
    double shifted_hess_eig_max = 0.0; // max top eigenvalue of hess(u) + du (x) du + S
    double sigma_km1_max = 0.0;     // max sigma_{k-1} of the augmented Hessian
};

/// The quantities the gradient and second-derivative estimates monitor; they
/// are reported, never asserted.
[[nodiscard]] inline Diagnostics diagnostics(const GridField& u, const Problem& p) {
    Diagnostics d;
    const std::vector<GridField> du = gradient(u);
    const TensorField hu = hessian(u);
    const TensorField w = augmented_hessian(u, p.S, p.sign);
    const int dim = p.grid.dim;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double norm2 = 0.0;
        SymMat shifted = hu[i];
        for (int a = 0; a < dim; ++a) {
            const double da = du[static_cast<std::size_t>(a)][i];
            norm2 += da * da;
            for (int b = a; b < dim; ++b)
                shifted.add(a, b, da * du[static_cast<std::size_t>(b)][i]);
        }
        shifted += p.S[i];
        const double top = eigen_sym(shifted).values.front();
        const double km1 = sigma_mat(w[i], p.k - 1);
        d.grad_sup = std::max(d.grad_sup, std::sqrt(norm2));
        if (i == 0) {
            d.shifted_hess_eig_max = top;
            d.sigma_km1_max = km1;
        } else {
            d.shifted_hess_eig_max = std::max(d.shifted_hess_eig_max, top);
            d.sigma_km1_max = std::max(d.sigma_km1_max, km1);
        }
    }
    return d;
}

} // namespace sigmak
