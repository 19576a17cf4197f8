#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "sigmak/errors.hpp"
#include "sigmak/rng.hpp"
#include "sigmak/symfunc.hpp"
#include "sigmak/symmat.hpp"

namespace sigmak {

/// Symmetric matrix with independent uniform entries in [lo, hi].
[[nodiscard]] inline SymMat random_symmetric(Rng& rng, int n, double lo, double hi) {
    SymMat a(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a.set(i, j, rng.uniform(lo, hi));
    return a;
}

/// Random matrix inside the level-k cone: a uniform draw shifted along the
/// identity until membership holds. Shifting stops at the first admissible
/// multiple, so samples are not confined to the positive-definite cone.
[[nodiscard]] inline SymMat random_in_cone(Rng& rng, int n, int k, double lo, double hi) {
    SymMat a = random_symmetric(rng, n, lo, hi);
    const ConeSpec cone{k, Sign::positive, 1.0};
    const double step = 0.25 * std::max(1.0, a.max_abs_entry());
    for (int tries = 0; tries < 4000; ++tries) {
        if (in_cone(a, cone)) return a;
        a.add_scaled_identity(step);
    }
    throw ConvergenceFailure("random_in_cone: shift did not reach the cone");
}

/// Positive semidefinite sample: the square of a symmetric draw.
[[nodiscard]] inline SymMat random_psd(Rng& rng, int n, double scale) {
    const SymMat b = random_symmetric(rng, n, -scale, scale);
    return product_sym(b, b);
}

/// Conjugates diag(lambda) by a product of random plane rotations; the
/// eigenvalues are preserved exactly in exact arithmetic.
[[nodiscard]] inline SymMat random_rotation_conjugate(Rng& rng, const std::vector<double>& lambda) {
    const int n = static_cast<int>(lambda.size());
    SymMat m = SymMat::diagonal(lambda);
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double c = std::cos(th);
            const double s = std::sin(th);
            SymMat r(n);
            // Rows/columns p and q of G m G^T; other entries change only in
            // those rows/columns.
            r = m;
            for (int l = 0; l < n; ++l) {
                if (l == p || l == q) continue;
                const double mp = m(p, l);
                const double mq = m(q, l);
                r.set(p, l, c * mp - s * mq);
                r.set(q, l, s * mp + c * mq);
            }
            const double mpp = m(p, p);
            const double mqq = m(q, q);
            const double mpq = m(p, q);
            r.set(p, p, c * c * mpp - 2.0 * s * c * mpq + s * s * mqq);
            r.set(q, q, s * s * mpp + 2.0 * s * c * mpq + c * c * mqq);
            r.set(p, q, s * c * (mpp - mqq) + (c * c - s * s) * mpq);
            m = r;
        }
    }
    return m;
}

/// Test-only fault switch: flips the sign of the A T_{q-1} term in the
/// Newton-transformation recurrence, breaking the contraction identities the
/// suite checks. Used to demonstrate the suite catches real violations.
enum class IdentityFault { none, newton_sign_flip };

namespace detail {

[[nodiscard]] inline SymMat newton_transform_faulted(const SymMat& a, int q, IdentityFault fault) {
    if (fault == IdentityFault::none) return newton_transform(a, q);
    const int n = a.dim();
    SymMat t = SymMat::identity(n);
    for (int r = 1; r <= q; ++r) {
        const SymMat m = product_sym(a, t);
        const double sr = m.trace() / static_cast<double>(r);
        t = m; // faulted: the recurrence subtracts this term
        t.add_scaled_identity(sr);
    }
    return t;
}

} // namespace detail

struct IdentityReport {
    std::string name;
    long trials = 0;
    double worst_error = 0.0; // residual in the identity's own tolerance units
    double tolerance = 0.0;
    bool pass = true;
    // Extremes observed by reporting-only checks (eigenvalue envelope).
    double observed_envelope = 0.0;
    // Serialized worst offender (row-major dim then entries) when pass = false.
    std::vector<double> offender;
};

struct IdentitySuiteConfig {
    int n_min = 2;
    int n_max = 6;
    long trials = 1000;        // per (n, k) pair and identity
    std::uint64_t seed = 42;
    IdentityFault fault = IdentityFault::none;
};

namespace detail {

inline void record(IdentityReport& rep, double err, const SymMat& a) {
    if (err > rep.worst_error) {
        rep.worst_error = err;
        if (err > rep.tolerance) {
            rep.offender.clear();
            rep.offender.push_back(a.dim());
            for (int i = 0; i < a.dim(); ++i)
                for (int j = 0; j < a.dim(); ++j) rep.offender.push_back(a(i, j));
        }
    }
}

} // namespace detail

/// Randomized verification of the contraction, trace, derivative, cone, and
/// concavity properties of the symmetric-function calculus. Each report's
/// worst_error is already scaled by the identity's tolerance denominator, so
/// pass means worst_error <= tolerance.
[[nodiscard]] inline std::vector<IdentityReport> run_identity_suite(const IdentitySuiteConfig& cfg) {
    if (cfg.n_min < 2 || cfg.n_max > kMaxMatDim || cfg.n_min > cfg.n_max)
        throw DomainError("run_identity_suite: dimension range outside 2.." +
                          std::to_string(kMaxMatDim));
    Rng rng(cfg.seed);

    IdentityReport euler{"euler-contraction", 0, 0.0, 1e-10, true, 0.0, {}};
    IdentityReport trace{"newton-trace", 0, 0.0, 1e-10, true, 0.0, {}};
    IdentityReport deriv{"sigma-derivative", 0, 0.0, 1e-6, true, 0.0, {}};
    IdentityReport cone_inc{"cone-inclusion", 0, 0.0, 0.0, true, 0.0, {}};
    IdentityReport concavity{"root-concavity", 0, 0.0, 1e-10, true, 0.0, {}};
    IdentityReport posdef{"newton-positive-definite", 0, 0.0, 0.0, true, 0.0, {}};
    IdentityReport monotone{"cone-monotonicity", 0, 0.0, 1e-10, true, 0.0, {}};
    IdentityReport envelope{"eigenvalue-envelope", 0, 0.0, 0.0, true, 0.0, {}};

    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
        for (int k = 1; k <= n; ++k) {
            const ConeSpec cone{k, Sign::positive, 1.0};
            for (long trial = 0; trial < cfg.trials; ++trial) {
                // Contraction and trace identities on a broad draw.
                {
                    const SymMat a = random_symmetric(rng, n, -5.0, 5.0);
                    const SymMat tkm1 = detail::newton_transform_faulted(a, k - 1, cfg.fault);
                    const double sk = sigma_mat(a, k);
                    const double skm1 = sigma_mat(a, k - 1);
                    const double lhs = tkm1.dot(a);
                    const double err_e = std::abs(lhs - k * sk) / (1.0 + std::abs(sk));
                    detail::record(euler, err_e, a);
                    ++euler.trials;
                    const double err_t =
                        std::abs(tkm1.trace() - (n - k + 1) * skm1) / (1.0 + std::abs(skm1));
                    detail::record(trace, err_t, a);
                    ++trace.trials;
                }
                // Directional derivative against central differences; a
                // narrower draw keeps the finite-difference rounding floor
                // far below the absolute tolerance.
                {
                    const SymMat a = random_symmetric(rng, n, -1.0, 1.0);
                    const SymMat b = random_symmetric(rng, n, -1.0, 1.0);
                    const SymMat tkm1 = detail::newton_transform_faulted(a, k - 1, cfg.fault);
                    const double eps = 1e-5;
                    const SymMat ap = a + b * eps;
                    const SymMat am = a - b * eps;
                    const double fd = (sigma_mat(ap, k) - sigma_mat(am, k)) / (2.0 * eps);
                    const double err = std::abs(fd - tkm1.dot(b));
                    detail::record(deriv, err, a);
                    ++deriv.trials;
                }
                // Cone inclusion, positive definiteness, concavity, and
                // monotonicity on cone samples.
                {
                    const SymMat a = random_in_cone(rng, n, k, -2.0, 2.0);
                    if (k >= 2) {
                        const ConeSpec lower{k - 1, Sign::positive, 1.0};
                        const double viol = in_cone(a, lower) ? 0.0 : 1.0;
                        detail::record(cone_inc, viol, a);
                        ++cone_inc.trials;
                    }
                    const SymMat tkm1 = detail::newton_transform_faulted(a, k - 1, cfg.fault);
                    const double mineig = eigen_sym(tkm1).values.back();
                    detail::record(posdef, mineig > 0.0 ? 0.0 : -mineig, a);
                    ++posdef.trials;

                    const SymMat b = random_in_cone(rng, n, k, -2.0, 2.0);
                    const double ra = std::pow(sigma_mat(a, k), 1.0 / k);
                    const double rb = std::pow(sigma_mat(b, k), 1.0 / k);
                    for (int ti = 0; ti <= 10; ++ti) {
                        const double s = 0.1 * ti;
                        const SymMat mix = a * (1.0 - s) + b * s;
                        if (!in_cone(mix, cone)) continue; // rounding at the boundary
                        const double rmix = std::pow(sigma_mat(mix, k), 1.0 / k);
                        const double gap = (1.0 - s) * ra + s * rb - rmix;
                        detail::record(concavity, gap > 0.0 ? gap : 0.0, mix);
                    }
                    ++concavity.trials;

                    const SymMat psd = random_psd(rng, n, 1.5);
                    const SymMat sum = a + psd;
                    if (in_cone(sum, cone)) {
                        const double gap = sigma_mat(a, k) - sigma_mat(sum, k);
                        detail::record(monotone, gap > 0.0 ? gap : 0.0, a);
                        ++monotone.trials;
                    }
                }
            }
            // Eigenvalue envelope: normalized cone samples with bounded
            // sigma_{k-1} stay eigenvalue-bounded; reported, not asserted.
            if (k >= 2) {
                const long env_trials = (cfg.trials * 100) / 15 + (cfg.trials > 0 ? 1 : 0);
                for (long trial = 0; trial < env_trials; ++trial) {
                    SymMat a = random_in_cone(rng, n, k, -2.0, 2.0);
                    const double sk = sigma_mat(a, k);
                    a *= std::pow(sk, -1.0 / k); // sigma_k = 1
                    if (sigma_mat(a, k - 1) > 10.0) continue;
                    const EigenList ev = eigen_sym(a);
                    const double top =
                        std::max(std::abs(ev.values.front()), std::abs(ev.values.back()));
                    envelope.observed_envelope = std::max(envelope.observed_envelope, top);
                    if (!std::isfinite(top)) detail::record(envelope, 1.0, a);
                    ++envelope.trials;
                }
            }
        }
    }

    std::vector<IdentityReport> out{euler,     trace,    deriv,    cone_inc,
                                    concavity, posdef,   monotone, envelope};
    for (auto& rep : out) rep.pass = rep.worst_error <= rep.tolerance;
    return out;
}

} // namespace sigmak
