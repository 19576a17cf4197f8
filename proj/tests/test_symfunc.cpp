#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sigmak/identities.hpp"
#include "sigmak/rng.hpp"
#include "sigmak/symfunc.hpp"
#include "sigmak/symmat.hpp"

using namespace sigmak;

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

TEST_CASE("elementary symmetric functions on eigenvalue lists") {
    CHECK(sigma({1.0, 2.0, 3.0}, 2) == 11.0);
    CHECK(sigma({2.0, 2.0}, 2) == 4.0);
    CHECK(sigma({1.0, 1.0, 1.0}, 3) == 1.0);
    CHECK(sigma({4.0, -2.0, 7.0}, 0) == 1.0);
    CHECK_THROWS_AS(sigma({1.0, 2.0}, 3), DomainError);
    CHECK_THROWS_AS(sigma({1.0, 2.0}, -1), DomainError);

    const double c = 1.5;
    for (int n = 2; n <= 8; ++n) {
        const std::vector<double> lam(static_cast<std::size_t>(n), c);
        for (int k = 0; k <= n; ++k)
            CHECK_THAT(sigma(lam, k),
                       Catch::Matchers::WithinRel(binom(n, k) * std::pow(c, k), 1e-14));
    }
}

TEST_CASE("matrix sigma agrees with the eigenvalue path") {
    CHECK(sigma_mat(SymMat::diagonal({1.0, 2.0, 3.0}), 2) == 11.0);
    CHECK_THAT(sigma_mat(SymMat::identity(3) * 2.0, 3), Catch::Matchers::WithinRel(8.0, 1e-14));

    Rng rng(20240611);
    for (int n = 2; n <= 8; ++n) {
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> lam(static_cast<std::size_t>(n));
            for (double& v : lam) v = rng.uniform(-3.0, 3.0);
            const SymMat a = random_rotation_conjugate(rng, lam);
            for (int k = 1; k <= n; ++k) {
                const double want = sigma(lam, k);
                CHECK_THAT(sigma_mat(a, k),
                           Catch::Matchers::WithinAbs(want, 1e-12 * (1.0 + std::abs(want))));
                CHECK_THAT(sigma(eigen_sym(a), k),
                           Catch::Matchers::WithinAbs(want, 1e-11 * (1.0 + std::abs(want))));
            }
        }
    }
}

TEST_CASE("Newton transformation recurrence") {
    const SymMat a = SymMat::diagonal({1.0, 2.0, 3.0});

    const SymMat t0 = newton_transform(a, 0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(t0(i, j) == (i == j ? 1.0 : 0.0));

    const SymMat t1 = newton_transform(a, 1);
    CHECK(t1(0, 0) == 5.0);
    CHECK(t1(1, 1) == 4.0);
    CHECK(t1(2, 2) == 3.0);
    CHECK(t1(0, 1) == 0.0);

    const SymMat t2 = newton_transform(a, 2);
    CHECK_THAT(t2.trace(), Catch::Matchers::WithinRel(11.0, 1e-14));

    CHECK_THROWS_AS(newton_transform(a, 4), DomainError);
    CHECK_THROWS_AS(newton_transform(a, -1), DomainError);

    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const SymMat b = random_symmetric(rng, 5, -5.0, 5.0);
        const SymMat t3 = newton_transform(b, 3);
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) CHECK(t3(i, j) == t3(j, i));
    }
}

TEST_CASE("symmetric eigenvalues by cyclic rotations") {
    const EigenList id3 = eigen_sym(SymMat::identity(3));
    CHECK(id3.values == std::vector<double>{1.0, 1.0, 1.0});

    const EigenList perm = eigen_sym(SymMat::diagonal({3.0, 1.0, 2.0}));
    CHECK(perm.values == std::vector<double>{3.0, 2.0, 1.0});

    SymMat two(2);
    two.set(0, 0, 2.0);
    two.set(1, 1, 2.0);
    two.set(0, 1, 1.0);
    const EigenList e2 = eigen_sym(two);
    CHECK_THAT(e2.values[0], Catch::Matchers::WithinAbs(3.0, 1e-14));
    CHECK_THAT(e2.values[1], Catch::Matchers::WithinAbs(1.0, 1e-14));

    Rng rng(99);
    for (int n = 2; n <= 8; ++n) {
        std::vector<double> lam(static_cast<std::size_t>(n));
        for (double& v : lam) v = rng.uniform(-4.0, 4.0);
        std::sort(lam.begin(), lam.end(), std::greater<>());
        const SymMat a = random_rotation_conjugate(rng, lam);
        const EigenList got = eigen_sym(a);
        REQUIRE(got.values.size() == lam.size());
        for (std::size_t i = 0; i < lam.size(); ++i)
            CHECK_THAT(got.values[i], Catch::Matchers::WithinAbs(lam[i], 1e-12));
    }
}

TEST_CASE("cone membership at t = 1") {
    for (int n = 2; n <= 8; ++n)
        for (int k = 1; k <= n; ++k)
            CHECK(in_cone(SymMat::identity(n), ConeSpec{k, Sign::positive, 1.0}));

    CHECK_FALSE(in_cone(SymMat::diagonal({1.0, 1.0, -1.0}), ConeSpec{3, Sign::positive, 1.0}));
    CHECK(in_cone(SymMat::diagonal({2.0, 2.0, -0.5}), ConeSpec{2, Sign::positive, 1.0}));
    CHECK(in_cone(SymMat::diagonal({1.0, 1.0, -1.0}), ConeSpec{1, Sign::positive, 1.0}));
    CHECK_FALSE(in_cone(SymMat::diagonal({1.0, 1.0, -1.0}), ConeSpec{2, Sign::positive, 1.0}));

    // Boundary counts as outside: sigma_3 vanishes exactly here.
    CHECK_FALSE(in_cone(SymMat::diagonal({1.0, 0.0, 1.0}), ConeSpec{3, Sign::positive, 1.0}));
    CHECK(in_cone(SymMat::diagonal({1.0, 0.0, 1.0}), ConeSpec{2, Sign::positive, 1.0}));
    CHECK_FALSE(in_cone(SymMat::diagonal({1.0, 1e-16}), ConeSpec{2, Sign::positive, 1.0}));

    // Negative orientation mirrors the positive test.
    CHECK(in_cone(SymMat::diagonal({-2.0, -2.0, 0.5}), ConeSpec{2, Sign::negative, 1.0}));
    CHECK_FALSE(in_cone(SymMat::identity(3), ConeSpec{2, Sign::negative, 1.0}));
}

TEST_CASE("blended cone and root for t < 1") {
    const ConeSpec half{2, Sign::positive, 0.5};
    const SymMat a = SymMat::diagonal({1.0, 2.0, 3.0});
    CHECK(in_cone(a, half));
    CHECK_THAT(sigma_k_root(a, half),
               Catch::Matchers::WithinAbs(0.5 * std::sqrt(11.0) + 0.5 * 6.0, 1e-14));
    CHECK_THAT(sigma_k_root(a, ConeSpec{2, Sign::positive, 1.0}),
               Catch::Matchers::WithinAbs(std::sqrt(11.0), 1e-14));

    // Outside the pure cone the root term is zero-extended; the blend is
    // carried by the trace part alone and stays admissible.
    const SymMat b = SymMat::diagonal({5.0, -1.0});
    CHECK_FALSE(in_cone(b, ConeSpec{2, Sign::positive, 1.0}));
    CHECK(in_cone(b, half));
    CHECK_THAT(sigma_k_root(b, half), Catch::Matchers::WithinAbs(0.5 * 4.0, 1e-14));

    CHECK_THROWS_AS(sigma_k_root(SymMat::diagonal({1.0, 1.0, -1.0}),
                                 ConeSpec{3, Sign::positive, 1.0}),
                    NotAdmissible);
    CHECK_THROWS_AS(sigma_k_root(SymMat::diagonal({-3.0, -1.0}), half), NotAdmissible);

    // t = 0 degenerates to the trace equation: membership is sigma_1 > 0.
    const ConeSpec zero{2, Sign::positive, 0.0};
    CHECK(in_cone(b, zero));
    CHECK_THAT(sigma_k_root(b, zero), Catch::Matchers::WithinAbs(4.0, 1e-14));
}

TEST_CASE("contraction and trace identities on random draws") {
    Rng rng(31337);
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 200; ++rep) {
            const SymMat a = random_symmetric(rng, n, -5.0, 5.0);
            for (int k = 1; k <= n; ++k) {
                const double sk = sigma_mat(a, k);
                const double skm1 = sigma_mat(a, k - 1);
                const SymMat tkm1 = newton_transform(a, k - 1);
                CHECK(std::abs(tkm1.dot(a) - k * sk) <= 1e-10 * (1.0 + std::abs(sk)));
                CHECK(std::abs(tkm1.trace() - (n - k + 1) * skm1) <=
                      1e-10 * (1.0 + std::abs(skm1)));
            }
        }
    }
}

TEST_CASE("directional derivative of sigma_k matches central differences") {
    Rng rng(4242);
    const double eps = 1e-5;
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 50; ++rep) {
            const SymMat a = random_symmetric(rng, n, -1.0, 1.0);
            const SymMat b = random_symmetric(rng, n, -1.0, 1.0);
            for (int k = 1; k <= n; ++k) {
                const double fd =
                    (sigma_mat(a + b * eps, k) - sigma_mat(a + b * (-eps), k)) / (2.0 * eps);
                CHECK(std::abs(fd - newton_transform(a, k - 1).dot(b)) <= 1e-6);
            }
        }
    }
}

TEST_CASE("cone geometry: inclusion, concavity, definiteness, monotonicity") {
    Rng rng(555);
    for (int n = 2; n <= 6; ++n) {
        for (int k = 2; k <= n; ++k) {
            for (int rep = 0; rep < 60; ++rep) {
                const SymMat a = random_in_cone(rng, n, k, -5.0, 5.0);
                const SymMat b = random_in_cone(rng, n, k, -5.0, 5.0);
                const ConeSpec cone{k, Sign::positive, 1.0};
                const ConeSpec down{k - 1, Sign::positive, 1.0};
                REQUIRE(in_cone(a, cone));
                CHECK(in_cone(a, down));

                const double ra = sigma_k_root(a, cone);
                const double rb = sigma_k_root(b, cone);
                for (int it = 0; it <= 10; ++it) {
                    const double t = it / 10.0;
                    const SymMat mix = a * (1.0 - t) + b * t;
                    if (!in_cone(mix, cone)) continue;
                    CHECK(sigma_k_root(mix, cone) >= (1.0 - t) * ra + t * rb - 1e-10);
                }

                CHECK(eigen_sym(newton_transform(a, k - 1)).values.back() > 0.0);

                const SymMat p = random_psd(rng, n, 1.5);
                if (in_cone(p + a, cone))
                    CHECK(sigma_mat(p + a, k) >= sigma_mat(a, k) - 1e-10);
            }
        }
    }
}

TEST_CASE("identity suite end to end") {
    IdentitySuiteConfig cfg;
    cfg.trials = 50;
    cfg.seed = 2024;
    const std::vector<IdentityReport> reports = run_identity_suite(cfg);
    REQUIRE(reports.size() == 8);
    for (const IdentityReport& r : reports) {
        INFO(r.name);
        CHECK(r.pass);
        CHECK(r.worst_error <= r.tolerance);
    }

    IdentitySuiteConfig bad = cfg;
    bad.fault = IdentityFault::newton_sign_flip;
    const std::vector<IdentityReport> faulted = run_identity_suite(bad);
    bool euler_failed = false;
    for (const IdentityReport& r : faulted)
        if (r.name == "euler-contraction" && !r.pass && !r.offender.empty()) euler_failed = true;
    CHECK(euler_failed);
}
