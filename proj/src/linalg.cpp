#include "rypanel/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "rypanel/errors.hpp"

namespace rypanel {

Vector mat_vec(const Matrix& a, const Vector& x) {
    Vector out(static_cast<size_t>(a.rows()), 0.0);
    for (int c = 0; c < a.cols(); ++c) {
        const double* col = a.col(c);
        const double xc = x[static_cast<size_t>(c)];
        for (int r = 0; r < a.rows(); ++r) out[static_cast<size_t>(r)] += col[r] * xc;
    }
    return out;
}

QrSolution qr_least_squares(const Matrix& x, const Vector& y) {
    const int n = x.rows();
    const int k = x.cols();
    if (n < k || k < 1) fail(ErrorCode::InsufficientObservations, "QR solve needs n >= k >= 1");

    Matrix a = x;                   // factored in place
    Vector qty = y;                 // Q'y accumulated alongside

    // Householder reflections, one per column.
    for (int j = 0; j < k; ++j) {
        double norm = 0.0;
        for (int i = j; i < n; ++i) norm = std::hypot(norm, a(i, j));
        if (norm == 0.0) {
            continue; // exactly zero column tail; rank check below reports it
        }
        if (a(j, j) > 0.0) norm = -norm;
        for (int i = j; i < n; ++i) a(i, j) /= norm;
        a(j, j) -= 1.0;

        // Apply I - v v' / v_j to the remaining columns and to qty.
        for (int c = j + 1; c < k; ++c) {
            double s = 0.0;
            for (int i = j; i < n; ++i) s += a(i, j) * a(i, c);
            s /= a(j, j);
            for (int i = j; i < n; ++i) a(i, c) += s * a(i, j);
        }
        double s = 0.0;
        for (int i = j; i < n; ++i) s += a(i, j) * qty[static_cast<size_t>(i)];
        s /= a(j, j);
        for (int i = j; i < n; ++i) qty[static_cast<size_t>(i)] += s * a(i, j);

        a(j, j) = norm; // store R diagonal over the reflector pivot
    }

    QrSolution sol;
    sol.r = Matrix(k, k);
    for (int c = 0; c < k; ++c)
        for (int r = 0; r <= c; ++r) sol.r(r, c) = a(r, c);

    sol.max_abs_diag = 0.0;
    sol.min_abs_diag = std::abs(sol.r(0, 0));
    sol.min_diag_index = 0;
    for (int j = 0; j < k; ++j) {
        const double d = std::abs(sol.r(j, j));
        if (d > sol.max_abs_diag) sol.max_abs_diag = d;
        if (d < sol.min_abs_diag) {
            sol.min_abs_diag = d;
            sol.min_diag_index = j;
        }
    }

    sol.beta.assign(static_cast<size_t>(k), 0.0);
    if (sol.min_abs_diag > 0.0) {
        for (int r = k - 1; r >= 0; --r) {
            double s = qty[static_cast<size_t>(r)];
            for (int c = r + 1; c < k; ++c) s -= sol.r(r, c) * sol.beta[static_cast<size_t>(c)];
            sol.beta[static_cast<size_t>(r)] = s / sol.r(r, r);
        }
    }
    return sol;
}

Matrix invert_upper_triangular(const Matrix& r) {
    const int k = r.rows();
    Matrix inv(k, k);
    for (int c = 0; c < k; ++c) {
        inv(c, c) = 1.0 / r(c, c);
        for (int i = c - 1; i >= 0; --i) {
            double s = 0.0;
            for (int j = i + 1; j <= c; ++j) s += r(i, j) * inv(j, c);
            inv(i, c) = -s / r(i, i);
        }
    }
    return inv;
}

std::optional<Matrix> cholesky_lower(const Matrix& m, double rel_tol) {
    const int k = m.rows();
    double scale = 0.0;
    for (int i = 0; i < k; ++i) scale = std::max(scale, std::abs(m(i, i)));
    if (scale == 0.0) return std::nullopt;

    Matrix l(k, k);
    for (int j = 0; j < k; ++j) {
        double d = m(j, j);
        for (int p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
        if (d <= rel_tol * scale) return std::nullopt;
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < k; ++i) {
            double s = m(i, j);
            for (int p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

Vector cholesky_solve(const Matrix& lower, const Vector& b) {
    const int k = lower.rows();
    Vector z(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
        double s = b[static_cast<size_t>(i)];
        for (int j = 0; j < i; ++j) s -= lower(i, j) * z[static_cast<size_t>(j)];
        z[static_cast<size_t>(i)] = s / lower(i, i);
    }
    Vector xv(static_cast<size_t>(k), 0.0);
    for (int i = k - 1; i >= 0; --i) {
        double s = z[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) s -= lower(j, i) * xv[static_cast<size_t>(j)];
        xv[static_cast<size_t>(i)] = s / lower(i, i);
    }
    return xv;
}

} // namespace rypanel
