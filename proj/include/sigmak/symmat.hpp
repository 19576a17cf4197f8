#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "sigmak/errors.hpp"

namespace sigmak {

inline constexpr int kMaxMatDim = 8;

/// Orientation of the admissibility cone; `negative` mirrors every test
/// through A -> -A.
enum class Sign { positive, negative };

/// Dense symmetric matrix of dimension 2..8 with exactly mirrored storage:
/// set() writes both triangles, so entries(i,j) == entries(j,i) bitwise.
class SymMat {
public:
    SymMat() : dim_(0) {}

    explicit SymMat(int dim) : dim_(dim) { check_dim(dim); }

    [[nodiscard]] static SymMat identity(int dim) {
        SymMat m(dim);
        for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
        return m;
    }

    [[nodiscard]] static SymMat diagonal(const std::vector<double>& d) {
        SymMat m(static_cast<int>(d.size()));
        for (int i = 0; i < m.dim_; ++i) m.set(i, i, d[static_cast<std::size_t>(i)]);
        return m;
    }

    [[nodiscard]] static SymMat diagonal(std::initializer_list<double> d) {
        return diagonal(std::vector<double>(d));
    }

    [[nodiscard]] int dim() const noexcept { return dim_; }

    [[nodiscard]] double operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * kMaxMatDim + static_cast<std::size_t>(j)];
    }

    void set(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * kMaxMatDim + static_cast<std::size_t>(j)] = v;
        a_[static_cast<std::size_t>(j) * kMaxMatDim + static_cast<std::size_t>(i)] = v;
    }

    void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

    SymMat& operator+=(const SymMat& o) {
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) set(i, j, (*this)(i, j) + o(i, j));
        return *this;
    }

    SymMat& operator-=(const SymMat& o) {
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) set(i, j, (*this)(i, j) - o(i, j));
        return *this;
    }

    SymMat& operator*=(double c) {
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) set(i, j, (*this)(i, j) * c);
        return *this;
    }

    [[nodiscard]] friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
    [[nodiscard]] friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
    [[nodiscard]] friend SymMat operator*(SymMat a, double c) { return a *= c; }
    [[nodiscard]] friend SymMat operator*(double c, SymMat a) { return a *= c; }

    [[nodiscard]] friend SymMat operator-(const SymMat& a) {
        SymMat r(a.dim_);
        for (int i = 0; i < a.dim_; ++i)
            for (int j = i; j < a.dim_; ++j) r.set(i, j, -a(i, j));
        return r;
    }

    SymMat& add_scaled_identity(double c) {
        for (int i = 0; i < dim_; ++i) set(i, i, (*this)(i, i) + c);
        return *this;
    }

    [[nodiscard]] double trace() const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += (*this)(i, i);
        return s;
    }

    /// Full contraction sum_{ij} A_ij B_ij.
    [[nodiscard]] double dot(const SymMat& o) const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * o(i, j);
        return s;
    }

    [[nodiscard]] double frobenius_norm() const { return std::sqrt(dot(*this)); }

    [[nodiscard]] double max_abs_entry() const {
        double m = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

private:
    static void check_dim(int dim) {
        if (dim < 1 || dim > kMaxMatDim)
            throw DomainError("SymMat dimension " + std::to_string(dim) + " outside 1.." +
                              std::to_string(kMaxMatDim));
    }

    int dim_;
    std::array<double, kMaxMatDim * kMaxMatDim> a_{};
};

/// Product of two symmetric matrices, mirrored back to exact symmetry.
/// Intended for products that are symmetric in exact arithmetic (powers,
/// polynomials of one matrix); mirroring removes only rounding skew.
[[nodiscard]] inline SymMat product_sym(const SymMat& a, const SymMat& b) {
    if (a.dim() != b.dim()) throw DomainError("product_sym: dimension mismatch");
    const int n = a.dim();
    SymMat r(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double sij = 0.0;
            double sji = 0.0;
            for (int l = 0; l < n; ++l) {
                sij += a(i, l) * b(l, j);
                sji += a(j, l) * b(l, i);
            }
            r.set(i, j, 0.5 * (sij + sji));
        }
    }
    return r;
}

/// Eigenvalues of a symmetric matrix, sorted descending.
struct EigenList {
    std::vector<double> values;
};

/// Eigenvalues by cyclic Jacobi rotations. Sweeps until the off-diagonal
/// Frobenius norm drops below 1e-14 times the matrix norm; always converges
/// for symmetric input at these dimensions.
[[nodiscard]] inline EigenList eigen_sym(const SymMat& a) {
    const int n = a.dim();
    if (n < 1) throw DomainError("eigen_sym: empty matrix");
    SymMat w = a;
    const double norm = w.frobenius_norm();
    if (norm > 0.0) {
        const double target = 1e-14 * norm;
        for (int sweep = 0; sweep < 64; ++sweep) {
            double off = 0.0;
            for (int p = 0; p < n; ++p)
                for (int q = p + 1; q < n; ++q) off += 2.0 * w(p, q) * w(p, q);
            if (std::sqrt(off) <= target) break;
            for (int p = 0; p < n; ++p) {
                for (int q = p + 1; q < n; ++q) {
                    const double apq = w(p, q);
                    if (apq == 0.0) continue;
                    const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
                    const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    const double app = w(p, p);
                    const double aqq = w(q, q);
                    w.set(p, p, app - t * apq);
                    w.set(q, q, aqq + t * apq);
                    w.set(p, q, 0.0);
                    for (int r = 0; r < n; ++r) {
                        if (r == p || r == q) continue;
                        const double arp = w(r, p);
                        const double arq = w(r, q);
                        w.set(r, p, c * arp - s * arq);
                        w.set(r, q, s * arp + c * arq);
                    }
                }
            }
        }
    }
    EigenList out;
    out.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.values[static_cast<std::size_t>(i)] = w(i, i);
    std::sort(out.values.begin(), out.values.end(), [](double x, double y) { return x > y; });
    return out;
}

} // namespace sigmak
