#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sigmak/errors.hpp"
#include "sigmak/symmat.hpp"

namespace sigmak {

/// Relative tolerance for "strictly positive" cone tests: a value counts as
/// positive only if it exceeds this multiple of the same expression evaluated
/// on absolute values. Boundary hits are classified as outside.
inline constexpr double kConeBoundaryTol = 1e-13;

/// Admissibility cone selector: level k, orientation, and homotopy blend
/// parameter t (t = 1 selects the pure level-k cone).
struct ConeSpec {
    int k = 1;
    Sign sign = Sign::positive;
    double t = 1.0;
};

namespace detail {

/// All elementary symmetric values e_0..e_kmax of the given numbers, by the
/// stable prefix recurrence (no subset enumeration).
inline void sigma_prefix(const std::vector<double>& lambda, int kmax, std::vector<double>& e) {
    e.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    e[0] = 1.0;
    const int n = static_cast<int>(lambda.size());
    for (int i = 0; i < n; ++i) {
        const double x = lambda[static_cast<std::size_t>(i)];
        const int top = std::min(kmax, i + 1);
        for (int j = top; j >= 1; --j)
            e[static_cast<std::size_t>(j)] += x * e[static_cast<std::size_t>(j) - 1];
    }
}

} // namespace detail

/// k-th elementary symmetric polynomial of the given values; sigma(., 0) = 1.
[[nodiscard]] inline double sigma(const std::vector<double>& lambda, int k) {
    const int n = static_cast<int>(lambda.size());
    if (k < 0 || k > n)
        throw DomainError("sigma: order " + std::to_string(k) + " outside 0.." + std::to_string(n));
    std::vector<double> e;
    detail::sigma_prefix(lambda, k, e);
    return e[static_cast<std::size_t>(k)];
}

[[nodiscard]] inline double sigma(const EigenList& lambda, int k) { return sigma(lambda.values, k); }

/// q-th Newton transformation T_q(A), built by the recurrence
/// T_0 = I, T_q = sigma_q(A) I - A T_{q-1}; the result is exactly symmetric.
[[nodiscard]] inline SymMat newton_transform(const SymMat& a, int q) {
    const int n = a.dim();
    if (q < 0 || q > n)
        throw DomainError("newton_transform: order " + std::to_string(q) + " outside 0.." +
                          std::to_string(n));
    SymMat t = SymMat::identity(n);
    for (int r = 1; r <= q; ++r) {
        const SymMat m = product_sym(a, t);
        const double sr = m.trace() / static_cast<double>(r);
        t = -m;
        t.add_scaled_identity(sr);
    }
    return t;
}

/// sigma_k of a matrix via characteristic-polynomial coefficients (the trace
/// recurrence sigma_r = tr(A T_{r-1}) / r), with no eigenvalue computation.
/// Agrees with sigma(eigen_sym(A), k) to rounding.
[[nodiscard]] inline double sigma_mat(const SymMat& a, int k) {
    const int n = a.dim();
    if (k < 0 || k > n)
        throw DomainError("sigma_mat: order " + std::to_string(k) + " outside 0.." + std::to_string(n));
    if (k == 0) return 1.0;
    SymMat t = SymMat::identity(n);
    double sr = 0.0;
    for (int r = 1; r <= k; ++r) {
        const SymMat m = product_sym(a, t);
        sr = m.trace() / static_cast<double>(r);
        if (r == k) break;
        t = -m;
        t.add_scaled_identity(sr);
    }
    return sr;
}

/// Pointwise evaluation of the blended symmetric-function value on one matrix.
/// `root` is sigma_k^{1/k} where all sigma_j (j <= k) clear the boundary
/// tolerance and 0 otherwise (the extension used for blends with t < 1);
/// `value` is t * root + (1 - t) * sigma_1. For the negative orientation every
/// quantity is evaluated on -A.
struct BlendEval {
    bool admissible = false;  // cone membership per ConeSpec
    bool gamma_k = false;     // all sigma_j > 0 (j <= k) at the matrix itself
    double value = 0.0;       // blended value (pure root when t = 1)
    double root = 0.0;        // extended sigma_k^{1/k}
    double sigma_k = 0.0;
    double sigma_km1 = 0.0;
    double sigma_1 = 0.0;
};

namespace detail {

/// Strict positivity of sigma_1..sigma_k with a tolerance that covers both
/// the summation roundoff (scale sigma_j(|lambda|)) and the eigenvalue noise
/// floor (scale sigma_1(|lambda|) * sigma_{j-1}(|lambda|)); boundary values
/// below it count as outside.
inline bool prefix_positive(const std::vector<double>& e, const std::vector<double>& eabs, int k) {
    for (int j = 1; j <= k; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const double scale = eabs[ju] + eabs[1] * eabs[ju - 1];
        if (!(e[ju] > kConeBoundaryTol * scale)) return false;
    }
    return true;
}

} // namespace detail

/// Segment sample count for blended-cone membership (s = 0, 1/32, ..., 1).
inline constexpr int kBlendSegmentSamples = 33;

[[nodiscard]] inline BlendEval evaluate_blend(const SymMat& a_in, const ConeSpec& cone) {
    const SymMat a = (cone.sign == Sign::negative) ? -a_in : a_in;
    const int n = a.dim();
    if (cone.k < 1 || cone.k > n)
        throw DomainError("evaluate_blend: cone level " + std::to_string(cone.k) + " outside 1.." +
                          std::to_string(n));

    std::vector<double> lam = eigen_sym(a).values;
    std::vector<double> lam_abs(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) lam_abs[i] = std::abs(lam[i]);

    std::vector<double> e;
    std::vector<double> eabs;
    detail::sigma_prefix(lam, cone.k, e);
    detail::sigma_prefix(lam_abs, cone.k, eabs);

    BlendEval out;
    out.sigma_k = e[static_cast<std::size_t>(cone.k)];
    out.sigma_km1 = e[static_cast<std::size_t>(cone.k) - 1];
    out.sigma_1 = e[1];
    out.gamma_k = detail::prefix_positive(e, eabs, cone.k);
    out.root = out.gamma_k ? std::pow(out.sigma_k, 1.0 / static_cast<double>(cone.k)) : 0.0;

    if (cone.t >= 1.0) {
        out.value = out.root;
        out.admissible = out.gamma_k;
        return out;
    }

    out.value = cone.t * out.root + (1.0 - cone.t) * out.sigma_1;

    // Blended-cone membership: sigma_1 > 0 and the blend stays positive along
    // the segment from A to the isotropic matrix (sigma_1/n) I. The segment
    // shares A's eigenvectors, so only the eigenvalues interpolate.
    double abs_sum = 0.0;
    for (double x : lam_abs) abs_sum += x;
    if (!(out.sigma_1 > kConeBoundaryTol * abs_sum)) return out;

    const double mu = out.sigma_1 / static_cast<double>(n);
    std::vector<double> ls(lam.size());
    std::vector<double> ls_abs(lam.size());
    for (int is = 0; is < kBlendSegmentSamples; ++is) {
        const double s = static_cast<double>(is) / (kBlendSegmentSamples - 1);
        for (std::size_t i = 0; i < lam.size(); ++i) {
            ls[i] = (1.0 - s) * lam[i] + s * mu;
            ls_abs[i] = std::abs(ls[i]);
        }
        detail::sigma_prefix(ls, cone.k, e);
        detail::sigma_prefix(ls_abs, cone.k, eabs);
        const bool gk = detail::prefix_positive(e, eabs, cone.k);
        const double root =
            gk ? std::pow(e[static_cast<std::size_t>(cone.k)], 1.0 / static_cast<double>(cone.k)) : 0.0;
        const double blend = cone.t * root + (1.0 - cone.t) * e[1];
        if (!(blend > 0.0)) return out;
    }
    out.admissible = true;
    return out;
}

/// Cone membership test. For t = 1 this is the classical characterization
/// sigma_j(A) > 0 for all j <= k; for t < 1 it is the sampled segment test of
/// evaluate_blend. Boundary values (within tolerance) count as outside.
[[nodiscard]] inline bool in_cone(const SymMat& a, const ConeSpec& cone) {
    return evaluate_blend(a, cone).admissible;
}

/// Blended k-th-root value t sigma_k^{1/k} + (1-t) sigma_1 (pure root at
/// t = 1), evaluated on -A for the negative orientation. Requires cone
/// membership.
[[nodiscard]] inline double sigma_k_root(const SymMat& a, const ConeSpec& cone) {
    const BlendEval ev = evaluate_blend(a, cone);
    if (!ev.admissible)
        throw NotAdmissible("sigma_k_root: matrix outside the level-" + std::to_string(cone.k) +
                                " cone",
                            NotAdmissible::npos, cone.k);
    return ev.value;
}

} // namespace sigmak
