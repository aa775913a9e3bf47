#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mkdv/errors.hpp"
#include "mkdv/grid.hpp"

namespace mkdv {

/// Cyclic pentadiagonal matrix: row i has entries at columns (i-2..i+2) mod n.
/// band[d][i] holds A(i, (i + d - 2) mod n), d = 0..4 <=> offsets -2..+2.
struct CyclicBandedMatrix {
    std::size_t n = 0;
    std::array<std::vector<double>, 5> band;

    static CyclicBandedMatrix zeros(std::size_t n) {
        CyclicBandedMatrix a;
        a.n = n;
        for (auto& d : a.band) d.assign(n, 0.0);
        return a;
    }

    /// Entry A(row, (row + offset) mod n), offset in [-2, 2].
    double& entry(std::size_t row, int offset) { return band[offset + 2][row]; }
    double entry(std::size_t row, int offset) const { return band[offset + 2][row]; }

    /// Expand to a dense matrix (colliding wrapped offsets accumulate).
    std::vector<std::vector<double>> to_dense() const {
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (int off = -2; off <= 2; ++off)
                a[i][wrap_index(static_cast<long>(i) + off, n)] += entry(i, off);
        return a;
    }
};

namespace detail {

/// Banded LU with partial pivoting in compact storage (the classic
/// Numerical Recipes bandec/banbks pair), fixed bandwidths kl = ku = 2.
/// Rows are stored left-justified: a[i][k] is the entry in column i-2+k.
class BandedLU {
  public:
    void factor(std::vector<std::array<double, 5>> a) {
        static constexpr int m1 = 2, mm = 5;
        a_ = std::move(a);
        const std::size_t n = a_.size();
        al_.assign(n, {0.0, 0.0});
        indx_.assign(n, 0);
        int l = m1;
        for (int i = 0; i < m1; ++i) {  // left-justify the top rows
            for (int j = m1 - i; j < mm; ++j) a_[i][j - l] = a_[i][j];
            --l;
            for (int j = mm - l - 1; j < mm; ++j) a_[i][j] = 0.0;
        }
        std::size_t lim = m1;  // rows k..lim-1 share column k in compact form
        for (std::size_t k = 0; k < n; ++k) {
            if (lim < n) ++lim;  // lim = min(k + m1 + 1, n)
            double piv = a_[k][0];
            std::size_t ipiv = k;
            for (std::size_t j = k + 1; j < lim; ++j)
                if (std::abs(a_[j][0]) > std::abs(piv)) { piv = a_[j][0]; ipiv = j; }
            indx_[k] = ipiv;
            if (std::abs(piv) < 1e-300)
                throw SingularMatrixError("banded LU: zero pivot at row " + std::to_string(k));
            if (ipiv != k) std::swap(a_[k], a_[ipiv]);
            for (std::size_t i = k + 1; i < lim; ++i) {
                const double mult = a_[i][0] / a_[k][0];
                al_[k][i - k - 1] = mult;
                for (int j = 1; j < mm; ++j) a_[i][j - 1] = a_[i][j] - mult * a_[k][j];
                a_[i][mm - 1] = 0.0;
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        static constexpr int m1 = 2, mm = 5;
        const std::size_t n = a_.size();
        for (std::size_t k = 0; k < n; ++k) {  // forward substitution
            if (indx_[k] != k) std::swap(b[k], b[indx_[k]]);
            for (std::size_t i = k + 1; i < std::min(n, k + 1 + static_cast<std::size_t>(m1)); ++i)
                b[i] -= al_[k][i - k - 1] * b[k];
        }
        int l = 1;
        for (long i = static_cast<long>(n) - 1; i >= 0; --i) {  // back substitution
            double x = b[i];
            for (int k = 1; k < l; ++k) x -= a_[i][k] * b[i + k];
            b[i] = x / a_[i][0];
            if (l < mm) ++l;
        }
        return b;
    }

  private:
    std::vector<std::array<double, 5>> a_;
    std::vector<std::array<double, 2>> al_;
    std::vector<std::size_t> indx_;
};

/// Dense LU with partial pivoting; used for very small systems where the
/// wrapped offsets overlap the band.
inline std::vector<double> dense_lu_solve(std::vector<std::vector<double>> a,
                                          std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t ipiv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[ipiv][k])) ipiv = i;
        if (std::abs(a[ipiv][k]) < 1e-300)
            throw SingularMatrixError("dense LU: zero pivot at column " + std::to_string(k));
        if (ipiv != k) {
            std::swap(a[k], a[ipiv]);
            std::swap(b[k], b[ipiv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double mult = a[i][k] / a[k][k];
            a[i][k] = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= mult * a[k][j];
            b[i] -= mult * b[k];
        }
    }
    for (long i = static_cast<long>(n) - 1; i >= 0; --i) {
        double x = b[i];
        for (std::size_t j = i + 1; j < n; ++j) x -= a[i][j] * b[j];
        b[i] = x / a[i][i];
    }
    return b;
}

}  // namespace detail

/// Direct O(n) solve of A x = b for a cyclic pentadiagonal A.
///
/// The two wrap-around unknowns x_{n-2}, x_{n-1} are moved to a 2x2 border:
/// the remaining (n-2)x(n-2) block is strictly banded (kl = ku = 2) and is
/// factored once by pivoted banded LU; three banded solves and a 2x2 Schur
/// complement finish the system. Small systems (n < 10), where wrapped
/// offsets overlap, fall back to dense LU.
inline std::vector<double> solve(const CyclicBandedMatrix& A, const std::vector<double>& b) {
    const std::size_t n = A.n;
    if (b.size() != n) throw ConfigError("cyclic solve: rhs size mismatch");
    if (n < 10) return detail::dense_lu_solve(A.to_dense(), b);

    const std::size_t m = n - 2;          // interior size
    const std::size_t p = n - 2, q = n - 1;  // border rows/columns

    // Interior band in compact storage: row i, entry k -> column i-2+k.
    std::vector<std::array<double, 5>> bandc(m, {0.0, 0.0, 0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < m; ++i)
        for (int off = -2; off <= 2; ++off) {
            const long col = static_cast<long>(i) + off;
            if (col >= 0 && col < static_cast<long>(m)) bandc[i][off + 2] = A.entry(i, off);
        }

    // Border columns U (m x 2): wrapped entries of the first and last interior rows.
    std::vector<std::array<double, 2>> U(m, {0.0, 0.0});
    U[0][0] = A.entry(0, -2);      // A(0, n-2)
    U[0][1] = A.entry(0, -1);      // A(0, n-1)
    U[1][1] = A.entry(1, -2);      // A(1, n-1)
    U[m - 2][0] = A.entry(m - 2, 2);  // A(n-4, n-2)
    U[m - 1][0] = A.entry(m - 1, 1);  // A(n-3, n-2)
    U[m - 1][1] = A.entry(m - 1, 2);  // A(n-3, n-1)

    // Border rows V (2 x m) and the border block C (2 x 2).
    auto vrow = [&](std::size_t row) {
        std::vector<std::pair<std::size_t, double>> entries;
        for (int off = -2; off <= 2; ++off) {
            const std::size_t col = wrap_index(static_cast<long>(row) + off, n);
            if (col < m) entries.emplace_back(col, A.entry(row, off));
        }
        return entries;
    };
    const auto Vp = vrow(p), Vq = vrow(q);
    const double C[2][2] = {{A.entry(p, 0), A.entry(p, 1)},
                            {A.entry(q, -1), A.entry(q, 0)}};

    detail::BandedLU lu;
    lu.factor(std::move(bandc));

    std::vector<double> rhs_int(b.begin(), b.begin() + m);
    const std::vector<double> z = lu.solve(std::move(rhs_int));
    std::vector<double> u0(m), u1(m);
    for (std::size_t i = 0; i < m; ++i) {
        u0[i] = U[i][0];
        u1[i] = U[i][1];
    }
    const std::vector<double> y0 = lu.solve(std::move(u0));
    const std::vector<double> y1 = lu.solve(std::move(u1));

    auto dot_sparse = [](const std::vector<std::pair<std::size_t, double>>& row,
                         const std::vector<double>& x) {
        double s = 0.0;
        for (const auto& [j, v] : row) s += v * x[j];
        return s;
    };

    // 2x2 Schur complement S = C - V Y, rhs_b = b_border - V z.
    const double S[2][2] = {{C[0][0] - dot_sparse(Vp, y0), C[0][1] - dot_sparse(Vp, y1)},
                            {C[1][0] - dot_sparse(Vq, y0), C[1][1] - dot_sparse(Vq, y1)}};
    const double rb[2] = {b[p] - dot_sparse(Vp, z), b[q] - dot_sparse(Vq, z)};
    const double det = S[0][0] * S[1][1] - S[0][1] * S[1][0];
    if (std::abs(det) < 1e-300)
        throw SingularMatrixError("cyclic solve: singular 2x2 border block");
    const double xp = (rb[0] * S[1][1] - rb[1] * S[0][1]) / det;
    const double xq = (S[0][0] * rb[1] - S[1][0] * rb[0]) / det;

    std::vector<double> x(n);
    for (std::size_t i = 0; i < m; ++i) x[i] = z[i] - y0[i] * xp - y1[i] * xq;
    x[p] = xp;
    x[q] = xq;
    return x;
}

}  // namespace mkdv
