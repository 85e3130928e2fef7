#pragma once

#include "pbh/error.hpp"
#include "pbh/expr/jet.hpp"

#include <cmath>
#include <vector>

namespace pbh {

/// Small dense row-major matrix over a generic scalar (double or Jet).
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, const T& fill = T(0.0))
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
        return m;
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
    const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

template <class T>
using Vector = std::vector<T>;

/// Lower Cholesky factor; throws DegenerateError unless the (base-value) matrix is positive definite.
template <class T>
Matrix<T> cholesky(const Matrix<T>& a) {
    const int n = a.rows();
    Matrix<T> l(n, n);
    for (int j = 0; j < n; ++j) {
        T diag = a(j, j);
        for (int k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(value_of(diag) > 0.0)) throw DegenerateError("matrix is not positive definite (Cholesky breakdown)");
        using std::sqrt;
        l(j, j) = sqrt(diag);
        for (int i = j + 1; i < n; ++i) {
            T s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

/// Inverse of a symmetric positive-definite matrix via its Cholesky factor.
template <class T>
Matrix<T> inverse_spd(const Matrix<T>& a) {
    const int n = a.rows();
    const Matrix<T> l = cholesky(a);
    Matrix<T> inv(n, n);
    for (int col = 0; col < n; ++col) {
        Vector<T> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            T s = T(i == col ? 1.0 : 0.0);
            for (int k = 0; k < i; ++k) s -= l(i, k) * y[static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(i)] = s / l(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            T s = y[static_cast<std::size_t>(i)];
            for (int k = i + 1; k < n; ++k) s -= l(k, i) * inv(k, col);
            inv(i, col) = s / l(i, i);
        }
    }
    return inv;
}

template <class T>
T determinant_spd(const Matrix<T>& a) {
    const Matrix<T> l = cholesky(a);
    T det = T(1.0);
    for (int i = 0; i < a.rows(); ++i) det *= l(i, i) * l(i, i);
    return det;
}

/// Bilinear form u^T A v.
template <class T>
T bilinear(const Matrix<T>& a, const Vector<T>& u, const Vector<T>& v) {
    T s = T(0.0);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
    return s;
}

template <class T>
Vector<T> mat_vec(const Matrix<T>& a, const Vector<T>& v) {
    Vector<T> out(static_cast<std::size_t>(a.rows()), T(0.0));
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out[static_cast<std::size_t>(i)] += a(i, j) * v[static_cast<std::size_t>(j)];
    return out;
}

inline double max_abs(const Vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

inline std::vector<double> values_of(const Vector<Jet>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(x.value());
    return out;
}

} // namespace pbh
