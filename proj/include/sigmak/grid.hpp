#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "sigmak/errors.hpp"
#include "sigmak/symmat.hpp"

namespace sigmak {

/// Uniform periodic grid on a rectangular cell, dimension 2 or 3. Indexing is
/// row-major over (i0, i1[, i2]) and wraps exactly; unused axes carry size 1.
struct TorusGrid {
    int dim = 2;
    std::array<int, 3> sizes{1, 1, 1};
    std::array<double, 3> lengths{0.0, 0.0, 0.0};
    std::array<double, 3> spacing{0.0, 0.0, 0.0};
    std::size_t npoints = 0;

    [[nodiscard]] static TorusGrid make(int dim, const std::vector<int>& sizes,
                                        const std::vector<double>& lengths = {}) {
        if (dim != 2 && dim != 3)
            throw DomainError("TorusGrid: dimension " + std::to_string(dim) + " not in {2, 3}");
        if (static_cast<int>(sizes.size()) != dim)
            throw DomainError("TorusGrid: need one size per axis");
        if (!lengths.empty() && static_cast<int>(lengths.size()) != dim)
            throw DomainError("TorusGrid: need one length per axis");
        TorusGrid g;
        g.dim = dim;
        g.npoints = 1;
        for (int a = 0; a < dim; ++a) {
            const int na = sizes[static_cast<std::size_t>(a)];
            if (na < 8 || na % 2 != 0)
                throw DomainError("TorusGrid: axis size " + std::to_string(na) +
                                  " must be even and at least 8");
            const double la =
                lengths.empty() ? 2.0 * std::numbers::pi : lengths[static_cast<std::size_t>(a)];
            if (!(la > 0.0)) throw DomainError("TorusGrid: axis length must be positive");
            g.sizes[static_cast<std::size_t>(a)] = na;
            g.lengths[static_cast<std::size_t>(a)] = la;
            g.spacing[static_cast<std::size_t>(a)] = la / na;
            g.npoints *= static_cast<std::size_t>(na);
        }
        return g;
    }

    [[nodiscard]] int wrap(int axis, int i) const {
        const int n = sizes[static_cast<std::size_t>(axis)];
        i %= n;
        return i < 0 ? i + n : i;
    }

    [[nodiscard]] std::size_t index(int i0, int i1, int i2 = 0) const {
        const auto n1 = static_cast<std::size_t>(sizes[1]);
        const auto n2 = static_cast<std::size_t>(sizes[2]);
        return (static_cast<std::size_t>(wrap(0, i0)) * n1 + static_cast<std::size_t>(wrap(1, i1))) *
                   n2 +
               static_cast<std::size_t>(wrap(2, i2));
    }

    [[nodiscard]] std::array<int, 3> decompose(std::size_t idx) const {
        const auto n1 = static_cast<std::size_t>(sizes[1]);
        const auto n2 = static_cast<std::size_t>(sizes[2]);
        std::array<int, 3> c{};
        c[2] = static_cast<int>(idx % n2);
        idx /= n2;
        c[1] = static_cast<int>(idx % n1);
        c[0] = static_cast<int>(idx / n1);
        return c;
    }

    [[nodiscard]] double coord(int axis, int i) const {
        return spacing[static_cast<std::size_t>(axis)] * i;
    }

    [[nodiscard]] std::array<double, 3> point(std::size_t idx) const {
        const auto c = decompose(idx);
        return {coord(0, c[0]), coord(1, c[1]), dim == 3 ? coord(2, c[2]) : 0.0};
    }

    [[nodiscard]] double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing[static_cast<std::size_t>(a)];
        return v;
    }

    [[nodiscard]] double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= lengths[static_cast<std::size_t>(a)];
        return v;
    }

    /// Flat diameter of the periodic cell: half the diagonal, the farthest
    /// any two points can be under the wrapped metric.
    [[nodiscard]] double diameter() const {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double la = lengths[static_cast<std::size_t>(a)];
            s += la * la;
        }
        return 0.5 * std::sqrt(s);
    }

    [[nodiscard]] bool same_shape(const TorusGrid& o) const {
        return dim == o.dim && sizes == o.sizes && lengths == o.lengths;
    }
};

/// Scalar samples over a TorusGrid, stored row-major.
struct GridField {
    TorusGrid grid;
    std::vector<double> values;

    GridField() = default;

    explicit GridField(const TorusGrid& g, double fill = 0.0)
        : grid(g), values(g.npoints, fill) {}

    [[nodiscard]] static GridField constant(const TorusGrid& g, double c) { return GridField(g, c); }

    [[nodiscard]] static GridField from_function(
        const TorusGrid& g, const std::function<double(const std::array<double, 3>&)>& fn) {
        GridField f(g);
        for (std::size_t i = 0; i < g.npoints; ++i) f.values[i] = fn(g.point(i));
        return f;
    }

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    [[nodiscard]] double min() const {
        double m = values.front();
        for (double v : values) m = std::min(m, v);
        return m;
    }

    [[nodiscard]] double max() const {
        double m = values.front();
        for (double v : values) m = std::max(m, v);
        return m;
    }

    [[nodiscard]] double sup_norm() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    /// Mean of the sampled values (volume-independent).
    [[nodiscard]] double mean() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }

    /// Riemann-sum integral over the cell: sum of values times cell volume.
    [[nodiscard]] double integral() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * grid.cell_volume();
    }

    GridField& operator+=(const GridField& o) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
        return *this;
    }

    GridField& operator-=(const GridField& o) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
        return *this;
    }

    GridField& operator*=(double c) {
        for (double& v : values) v *= c;
        return *this;
    }

    /// In-place v += c * o.
    GridField& add_scaled(const GridField& o, double c) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += c * o.values[i];
        return *this;
    }

    GridField& shift(double c) {
        for (double& v : values) v += c;
        return *this;
    }

    [[nodiscard]] bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    [[nodiscard]] friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    [[nodiscard]] friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    [[nodiscard]] friend GridField operator*(GridField a, double c) { return a *= c; }
};

/// One symmetric matrix per grid point.
struct TensorField {
    TorusGrid grid;
    std::vector<SymMat> values;

    TensorField() = default;

    explicit TensorField(const TorusGrid& g, int mat_dim)
        : grid(g), values(g.npoints, SymMat(mat_dim)) {}

    [[nodiscard]] static TensorField constant(const TorusGrid& g, const SymMat& m) {
        TensorField t(g, m.dim());
        for (auto& v : t.values) v = m;
        return t;
    }

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] const SymMat& operator[](std::size_t i) const { return values[i]; }
    SymMat& operator[](std::size_t i) { return values[i]; }
};

[[nodiscard]] inline double sup_distance(const GridField& a, const GridField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace sigmak
