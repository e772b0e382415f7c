#pragma once

#include <optional>
#include <vector>

namespace rypanel {

/// Dense column-major matrix. Small models only (k <= a few dozen columns),
/// so no blocking or expression tricks, just contiguous storage.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return data_[static_cast<size_t>(c) * rows_ + r]; }
    double operator()(int r, int c) const { return data_[static_cast<size_t>(c) * rows_ + r]; }

    double* col(int c) { return data_.data() + static_cast<size_t>(c) * rows_; }
    const double* col(int c) const { return data_.data() + static_cast<size_t>(c) * rows_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

using Vector = std::vector<double>;

Vector mat_vec(const Matrix& a, const Vector& x);

/// Householder QR least-squares solve. Returns the coefficient vector plus
/// the R factor (upper triangle, k x k) needed for covariance work.
struct QrSolution {
    Vector beta;
    Matrix r;              // upper triangular k x k
    double max_abs_diag = 0.0;
    double min_abs_diag = 0.0;
    int min_diag_index = 0;
};

QrSolution qr_least_squares(const Matrix& x, const Vector& y);

/// Inverse of an upper-triangular matrix by back substitution.
Matrix invert_upper_triangular(const Matrix& r);

/// Cholesky factor (lower) of a symmetric matrix. Empty when the matrix is
/// not positive definite relative to `rel_tol * max |diagonal|`.
std::optional<Matrix> cholesky_lower(const Matrix& m, double rel_tol);

/// Solves L L^T x = b given the lower Cholesky factor.
Vector cholesky_solve(const Matrix& lower, const Vector& b);

} // namespace rypanel
