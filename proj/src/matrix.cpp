#include "cmlp/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace cmlp {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
        throw std::invalid_argument("Matrix: data length != rows*cols");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::column(std::vector<double> v) {
    const std::size_t n = v.size();
    return Matrix(n, 1, std::move(v));
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void Matrix::fill(double v) {
    for (double& x : data_) x = v;
}

void matmul_acc(const Matrix& a, const Matrix& b, Matrix& c) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: a.cols != b.rows");
    if (c.rows() != a.rows() || c.cols() != b.cols())
        throw std::invalid_argument("matmul: bad output shape");
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* pc = c.data().data();
    // i-k-j order: inner loop runs over contiguous rows of B and C.
    for (std::size_t i = 0; i < n; ++i) {
        double* ci = pc + i * m;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double aik = pa[i * k + kk];
            const double* bk = pb + kk * m;
            for (std::size_t j = 0; j < m; ++j) ci[j] += aik * bk[j];
        }
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    matmul_acc(a, b, c);
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("add: shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("sub: shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
    return c;
}

Matrix scale(const Matrix& a, double c) {
    Matrix r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] *= c;
    return r;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

}  // namespace cmlp
