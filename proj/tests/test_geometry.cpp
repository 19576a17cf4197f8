#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "sigmak/catalog.hpp"
#include "sigmak/field_io.hpp"
#include "sigmak/grid.hpp"
#include "sigmak/models.hpp"
#include "sigmak/operators.hpp"
#include "sigmak/rng.hpp"
#include "sigmak/symfunc.hpp"

using namespace sigmak;

namespace {

constexpr double kPi = std::numbers::pi;

/// Analytic conformal Hessian assembled the covariant way: partial Hessian of
/// h minus the Christoffel contraction of the rescaled metric,
/// Gamma^l_ij = -u_i d^l_j - u_j d^l_i + delta_ij u_l.
SymMat christoffel_reference(const CatalogEntry& ue, double uamp, const CatalogEntry& he,
                             double hamp, const std::array<double, 3>& x, int dim) {
    const std::array<double, 3> du = catalog_gradient(ue, uamp, x, dim);
    const std::array<double, 3> dh = catalog_gradient(he, hamp, x, dim);
    const SymMat hess_h = catalog_hessian(he, hamp, x, dim);
    SymMat out(dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            double gamma_dot_dh = 0.0;
            for (int l = 0; l < dim; ++l) {
                double gamma = 0.0;
                if (l == j) gamma -= du[static_cast<std::size_t>(i)];
                if (l == i) gamma -= du[static_cast<std::size_t>(j)];
                if (i == j) gamma += du[static_cast<std::size_t>(l)];
                gamma_dot_dh += gamma * dh[static_cast<std::size_t>(l)];
            }
            out.set(i, j, hess_h(i, j) - gamma_dot_dh);
        }
    }
    return out;
}

double conformal_discrepancy(int n) {
    const TorusGrid g = TorusGrid::make(2, {n, n});
    const CatalogEntry& ue = catalog_lookup("sinxcosy");
    const CatalogEntry& he = catalog_lookup("cosxcosy");
    const GridField u = sample_catalog(g, "sinxcosy", 0.3, 0.0);
    const GridField h = sample_catalog(g, "cosxcosy", 0.2, 0.0);
    const TensorField ch = conformal_hessian(h, u);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.npoints; ++i) {
        const SymMat ref = christoffel_reference(ue, 0.3, he, 0.2, g.point(i), 2);
        worst = std::max(worst, (ch[i] - ref).max_abs_entry());
    }
    return worst;
}

} // namespace

TEST_CASE("torus grid construction and indexing") {
    CHECK_THROWS_AS(TorusGrid::make(4, {8, 8, 8, 8}), DomainError);
    CHECK_THROWS_AS(TorusGrid::make(2, {8, 7}), DomainError);
    CHECK_THROWS_AS(TorusGrid::make(2, {8, 6}), DomainError);
    CHECK_THROWS_AS(TorusGrid::make(2, {8, 8}, {1.0, -1.0}), DomainError);
    CHECK_THROWS_AS(TorusGrid::make(3, {8, 8}), DomainError);

    const TorusGrid g = TorusGrid::make(2, {8, 16});
    CHECK(g.npoints == 128);
    CHECK(g.lengths[0] == 2.0 * kPi);
    CHECK(g.spacing[1] == 2.0 * kPi / 16.0);
    CHECK_THAT(g.volume(), Catch::Matchers::WithinRel(4.0 * kPi * kPi, 1e-14));
    CHECK_THAT(g.diameter(),
               Catch::Matchers::WithinRel(0.5 * std::sqrt(8.0) * kPi, 1e-14));

    CHECK(g.wrap(0, -1) == 7);
    CHECK(g.wrap(1, 16) == 0);
    CHECK(g.index(0, 0) == 0);
    CHECK(g.index(1, 3) == 19);
    CHECK(g.index(-1, -1) == g.index(7, 15));
    for (std::size_t i = 0; i < g.npoints; ++i) {
        const auto c = g.decompose(i);
        CHECK(g.index(c[0], c[1], c[2]) == i);
    }

    const TorusGrid g3 = TorusGrid::make(3, {8, 10, 12}, {1.0, 2.0, 3.0});
    CHECK(g3.npoints == 960);
    CHECK_THAT(g3.volume(), Catch::Matchers::WithinRel(6.0, 1e-14));
    CHECK(g3.same_shape(TorusGrid::make(3, {8, 10, 12}, {1.0, 2.0, 3.0})));
    CHECK_FALSE(g3.same_shape(g));
}

TEST_CASE("grid fields: reductions and arithmetic") {
    const TorusGrid g = TorusGrid::make(2, {16, 16});
    const GridField one = GridField::constant(g, 1.0);
    CHECK(one.min() == 1.0);
    CHECK(one.max() == 1.0);
    CHECK(one.mean() == 1.0);
    CHECK_THAT(one.integral(), Catch::Matchers::WithinRel(g.volume(), 1e-14));

    GridField f = GridField::from_function(g, [](const std::array<double, 3>& x) {
        return std::sin(x[0]);
    });
    CHECK_THAT(f.sup_norm(), Catch::Matchers::WithinAbs(1.0, 1e-14));
    CHECK(std::abs(f.mean()) < 1e-14);
    CHECK(f.all_finite());

    GridField h = f;
    h.shift(2.0);
    CHECK_THAT(h.min(), Catch::Matchers::WithinAbs(1.0, 1e-14));
    h.add_scaled(f, -1.0);
    CHECK_THAT(sup_distance(h, GridField::constant(g, 2.0)),
               Catch::Matchers::WithinAbs(0.0, 1e-14));

    h[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(h.all_finite());
}

TEST_CASE("gradient: exactness, accuracy, equivariance") {
    const TorusGrid g = TorusGrid::make(2, {64, 64});
    const std::vector<GridField> zero = gradient(GridField::constant(g, 3.0));
    CHECK(zero[0].sup_norm() == 0.0);
    CHECK(zero[1].sup_norm() == 0.0);

    const GridField sinx = GridField::from_function(g, [](const std::array<double, 3>& x) {
        return std::sin(x[0]);
    });
    const std::vector<GridField> ds = gradient(sinx);
    const double h = g.spacing[0];
    double worst = 0.0;
    for (std::size_t i = 0; i < g.npoints; ++i)
        worst = std::max(worst, std::abs(ds[0][i] - std::cos(g.point(i)[0])));
    CHECK(worst <= h * h);
    CHECK(ds[1].sup_norm() == 0.0);

    const GridField sc = sample_catalog(g, "sinxcosy", 1.0, 0.0);
    const std::vector<GridField> dsc = gradient(sc);
    const CatalogEntry& e = catalog_lookup("sinxcosy");
    worst = 0.0;
    for (std::size_t i = 0; i < g.npoints; ++i) {
        const std::array<double, 3> want = catalog_gradient(e, 1.0, g.point(i), 2);
        worst = std::max(worst, std::abs(dsc[0][i] - want[0]));
        worst = std::max(worst, std::abs(dsc[1][i] - want[1]));
    }
    CHECK(worst <= h * h);

    // Rolling the samples by one cell rolls the derivative by one cell.
    GridField rolled(g);
    for (std::size_t i = 0; i < g.npoints; ++i) {
        const auto c = g.decompose(i);
        rolled[i] = sc[g.index(c[0] - 1, c[1])];
    }
    const std::vector<GridField> drolled = gradient(rolled);
    for (std::size_t i = 0; i < g.npoints; ++i) {
        const auto c = g.decompose(i);
        CHECK(drolled[0][i] == dsc[0][g.index(c[0] - 1, c[1])]);
        CHECK(drolled[1][i] == dsc[1][g.index(c[0] - 1, c[1])]);
    }
}

TEST_CASE("hessian: stencil structure and accuracy") {
    const TorusGrid g = TorusGrid::make(2, {64, 64});
    const TensorField zero = hessian(GridField::constant(g, -2.5));
    for (std::size_t i = 0; i < g.npoints; ++i) CHECK(zero[i].max_abs_entry() == 0.0);

    const GridField sinx = GridField::from_function(g, [](const std::array<double, 3>& x) {
        return std::sin(x[0]);
    });
    const TensorField hs = hessian(sinx);
    const double h = g.spacing[0];
    double worst = 0.0;
    for (std::size_t i = 0; i < g.npoints; ++i) {
        worst = std::max(worst, std::abs(hs[i](0, 0) + std::sin(g.point(i)[0])));
        CHECK(hs[i](1, 1) == 0.0);
        CHECK(hs[i](0, 1) == 0.0);
    }
    CHECK(worst <= h * h);

    const GridField sc = sample_catalog(g, "sinxcosy", 1.0, 0.0);
    const TensorField hsc = hessian(sc);
    const CatalogEntry& e = catalog_lookup("sinxcosy");
    worst = 0.0;
    for (std::size_t i = 0; i < g.npoints; ++i) {
        const SymMat want = catalog_hessian(e, 1.0, g.point(i), 2);
        worst = std::max(worst, (hsc[i] - want).max_abs_entry());
        CHECK(hsc[i](0, 1) == hsc[i](1, 0));
    }
    CHECK(worst <= h * h);

    const TorusGrid g3 = TorusGrid::make(3, {16, 16, 16});
    const GridField t3 = sample_catalog(g3, "sinxcosycosz", 1.0, 0.0);
    const TensorField h3 = hessian(t3);
    const CatalogEntry& e3 = catalog_lookup("sinxcosycosz");
    worst = 0.0;
    for (std::size_t i = 0; i < g3.npoints; ++i) {
        const SymMat want = catalog_hessian(e3, 1.0, g3.point(i), 3);
        worst = std::max(worst, (h3[i] - want).max_abs_entry());
    }
    CHECK(worst <= g3.spacing[0] * g3.spacing[0]);
}

TEST_CASE("augmented hessian at zero and near zero") {
    const TorusGrid g = TorusGrid::make(2, {32, 32});
    TensorField s(g, 2);
    for (std::size_t i = 0; i < g.npoints; ++i) s[i] = SymMat::identity(2) * 2.0;

    const GridField zero(g, 0.0);
    for (const Sign sign : {Sign::positive, Sign::negative}) {
        const TensorField w = augmented_hessian(zero, s, sign);
        for (std::size_t i = 0; i < g.npoints; ++i)
            CHECK((w[i] - s[i]).max_abs_entry() == 0.0);
    }

    const GridField bump = GridField::from_function(g, [](const std::array<double, 3>& x) {
        return 0.1 * std::sin(x[0]);
    });
    const TensorField wb = augmented_hessian(bump, s, Sign::positive);
    const ConeSpec cone{2, Sign::positive, 1.0};
    for (std::size_t i = 0; i < g.npoints; ++i) CHECK(in_cone(wb[i], cone));

    // The two orientations differ exactly by the sign of the gradient terms.
    const TensorField wn = augmented_hessian(bump, s, Sign::negative);
    const std::vector<GridField> du = gradient(bump);
    for (std::size_t i = 0; i < g.npoints; ++i) {
        SymMat grad_part(2);
        for (int a = 0; a < 2; ++a)
            for (int b = a; b < 2; ++b) grad_part.set(a, b, du[a][i] * du[b][i]);
        grad_part.add_scaled_identity(-0.5 * (du[0][i] * du[0][i] + du[1][i] * du[1][i]));
        CHECK((wb[i] - wn[i] - grad_part * 2.0).max_abs_entry() < 1e-15);
    }
}

TEST_CASE("conformal hessian identities") {
    const TorusGrid g = TorusGrid::make(2, {32, 32});
    const GridField u = sample_catalog(g, "sinxcosy", 0.4, 0.0);
    const GridField h = sample_catalog(g, "cosxcosy", 0.3, 0.0);

    const TensorField plain = conformal_hessian(h, GridField(g, 0.0));
    const TensorField hh = hessian(h);
    for (std::size_t i = 0; i < g.npoints; ++i)
        CHECK((plain[i] - hh[i]).max_abs_entry() == 0.0);

    const TensorField of_const = conformal_hessian(GridField(g, 1.0), u);
    for (std::size_t i = 0; i < g.npoints; ++i) CHECK(of_const[i].max_abs_entry() == 0.0);

    // h = u: term-by-term assembly from the primitive operators.
    const TensorField self = conformal_hessian(u, u);
    const TensorField hu = hessian(u);
    const std::vector<GridField> du = gradient(u);
    for (std::size_t i = 0; i < g.npoints; ++i) {
        SymMat want = hu[i];
        double norm2 = 0.0;
        for (int a = 0; a < 2; ++a) {
            norm2 += du[a][i] * du[a][i];
            for (int b = a; b < 2; ++b)
                want.set(a, b, want(a, b) + 2.0 * du[a][i] * du[b][i]);
        }
        want.add_scaled_identity(-norm2);
        CHECK((self[i] - want).max_abs_entry() < 1e-15);
    }
}

TEST_CASE("conformal hessian is the derivative of the augmented hessian") {
    const TorusGrid g = TorusGrid::make(2, {16, 16});
    TensorField s(g, 2);
    for (std::size_t i = 0; i < g.npoints; ++i) s[i] = SymMat::diagonal({1.5, 2.5});
    const GridField u = sample_catalog(g, "sinxcosy", 0.3, 0.1);
    const GridField h = sample_catalog(g, "cosxcosy", 0.7, 0.0);
    const double eps = 1e-3;

    GridField up = u;
    up.add_scaled(h, eps);
    GridField um = u;
    um.add_scaled(h, -eps);

    // The augmented Hessian is quadratic in the field, so the centered
    // difference equals the derivative up to roundoff only.
    const TensorField ch = conformal_hessian(h, u);
    const TensorField wp = augmented_hessian(up, s, Sign::positive);
    const TensorField wm = augmented_hessian(um, s, Sign::positive);
    for (std::size_t i = 0; i < g.npoints; ++i) {
        const SymMat fd = (wp[i] - wm[i]) * (1.0 / (2.0 * eps));
        CHECK((fd - ch[i]).max_abs_entry() < 1e-11);
    }

    // Negative orientation: the derivative is the conformal Hessian taken at
    // the reflected conformal factor.
    GridField mu = u;
    mu *= -1.0;
    const TensorField chn = conformal_hessian(h, mu);
    const TensorField wpn = augmented_hessian(up, s, Sign::negative);
    const TensorField wmn = augmented_hessian(um, s, Sign::negative);
    for (std::size_t i = 0; i < g.npoints; ++i) {
        const SymMat fd = (wpn[i] - wmn[i]) * (1.0 / (2.0 * eps));
        CHECK((fd - chn[i]).max_abs_entry() < 1e-11);
    }
}

TEST_CASE("conformal hessian converges against the Christoffel assembly") {
    const double e32 = conformal_discrepancy(32);
    const double e64 = conformal_discrepancy(64);
    const double e128 = conformal_discrepancy(128);
    CHECK(e32 / e64 >= 3.0);
    CHECK(e32 / e64 <= 5.0);
    CHECK(e64 / e128 >= 3.0);
    CHECK(e64 / e128 <= 5.0);
}

TEST_CASE("model geometry constants") {
    const double half_pi2 = kPi * kPi / 2.0;
    for (int n = 3; n <= 8; ++n) {
        const ModelGeometry s = make_sphere(n);
        CHECK_THAT(s.ricci_multiple, Catch::Matchers::WithinAbs(n - 1.0, 1e-14));
        CHECK_THAT(s.scalar_curv, Catch::Matchers::WithinAbs(n * (n - 1.0), 1e-14));
        CHECK_THAT(s.schouten_multiple, Catch::Matchers::WithinAbs(0.5, 1e-12));
        CHECK_THAT(model_schouten(s).invariant, Catch::Matchers::WithinAbs(half_pi2, 1e-12));

        const ModelGeometry rp = make_real_projective(n);
        CHECK_THAT(rp.schouten_multiple, Catch::Matchers::WithinAbs(0.5, 1e-12));
        CHECK_THAT(model_schouten(rp).invariant,
                   Catch::Matchers::WithinAbs(kPi * kPi / 8.0, 1e-12));
    }
    for (int m = 2; m <= 4; ++m) {
        const ModelGeometry cp = make_complex_projective(m);
        CHECK(cp.real_dim == 2 * m);
        CHECK_THAT(cp.ricci_multiple, Catch::Matchers::WithinAbs(2.0 * m + 2.0, 1e-14));
        const double want = (m + 1.0) / (2.0 * m - 1.0) * kPi * kPi / 4.0;
        CHECK_THAT(model_schouten(cp).invariant, Catch::Matchers::WithinAbs(want, 1e-12));
    }
    CHECK_THROWS_AS(make_complex_projective(1), DomainError);
    CHECK_THROWS_AS(make_sphere(2), DomainError);

    const std::vector<ModelTableRow> table = model_table();
    REQUIRE(table.size() == 15);
    int feasible = 0;
    for (const ModelTableRow& r : table) feasible += r.feasible ? 1 : 0;
    // Spheres sit exactly on the strict threshold; everything else is below.
    CHECK(feasible == 9);
}

TEST_CASE("field serialization round-trips exactly") {
    const TorusGrid g = TorusGrid::make(2, {8, 10}, {1.0 / 3.0, kPi});
    GridField f(g);
    Rng rng(17);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-1e3, 1e3);
    f[0] = 1.0 / 3.0;
    f[1] = -0.0;
    f[2] = 1e-300;
    f[3] = 12345.678901234567;

    const std::string base = "roundtrip_field";
    write_field(f, base);
    const GridField back = read_field(base);
    REQUIRE(back.grid.same_shape(g));
    REQUIRE(back.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);

    CHECK_THROWS(read_field("no_such_field_base"));
    std::remove((base + ".json").c_str());
    std::remove((base + ".csv").c_str());
}
