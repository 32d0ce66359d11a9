#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "solitonforge/error.hpp"
#include "solitonforge/jet.hpp"

namespace solitonforge {

inline double value_of(double v) noexcept { return v; }
inline double value_of(const Jet& j) noexcept { return j.value(); }

/// Small dense row-major matrix; T is double or Jet.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, const T& fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {}

    Matrix(std::initializer_list<std::initializer_list<T>> rows)
    {
        rows_ = static_cast<int>(rows.size());
        cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != cols_)
                throw std::invalid_argument("ragged matrix initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(int n, const T& zero = T{})
    {
        Matrix m(n, n, zero);
        for (int i = 0; i < n; ++i)
            m(i, i) = zero + 1.0;
        return m;
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    T& operator()(int i, int j) noexcept { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
    const T& operator()(int i, int j) const noexcept
    {
        return data_[static_cast<std::size_t>(i * cols_ + j)];
    }

    Matrix transposed() const
    {
        Matrix t(cols_, rows_, data_.empty() ? T{} : data_.front());
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("matrix product shape mismatch");
        const T zero = a(0, 0) * 0.0;
        Matrix c(a.rows_, b.cols_, zero);
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < b.cols_; ++j) {
                T s = zero;
                for (int k = 0; k < a.cols_; ++k)
                    s += a(i, k) * b(k, j);
                c(i, j) = s;
            }
        return c;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;

/// Solves A X = B by Gaussian elimination with partial pivoting on values.
template <class T>
Matrix<T> solve(Matrix<T> a, Matrix<T> b, double singular_tol = 1e-12)
{
    const int n = a.rows();
    if (a.cols() != n || b.rows() != n)
        throw std::invalid_argument("solve: shape mismatch");
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(value_of(a(r, col))) > std::abs(value_of(a(pivot, col))))
                pivot = r;
        if (std::abs(value_of(a(pivot, col))) <= singular_tol)
            throw NumericalError("singular matrix in linear solve");
        if (pivot != col) {
            for (int j = 0; j < n; ++j)
                std::swap(a(col, j), a(pivot, j));
            for (int j = 0; j < b.cols(); ++j)
                std::swap(b(col, j), b(pivot, j));
        }
        for (int r = col + 1; r < n; ++r) {
            const T factor = a(r, col) / a(col, col);
            for (int j = col; j < n; ++j)
                a(r, j) -= factor * a(col, j);
            for (int j = 0; j < b.cols(); ++j)
                b(r, j) -= factor * b(col, j);
        }
    }
    for (int col = n - 1; col >= 0; --col)
        for (int j = 0; j < b.cols(); ++j) {
            T s = b(col, j);
            for (int k = col + 1; k < n; ++k)
                s -= a(col, k) * b(k, j);
            b(col, j) = s / a(col, col);
        }
    return b;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a, double singular_tol = 1e-12)
{
    return solve(a, Matrix<T>::identity(a.rows(), a(0, 0) * 0.0), singular_tol);
}

inline std::vector<double> solve(const RealMatrix& a, const std::vector<double>& b)
{
    RealMatrix rhs(static_cast<int>(b.size()), 1);
    for (std::size_t i = 0; i < b.size(); ++i)
        rhs(static_cast<int>(i), 0) = b[i];
    RealMatrix x = solve(a, rhs);
    std::vector<double> out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        out[i] = x(static_cast<int>(i), 0);
    return out;
}

inline double determinant(RealMatrix a)
{
    const int n = a.rows();
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col)))
                pivot = r;
        if (a(pivot, col) == 0.0)
            return 0.0;
        if (pivot != col) {
            for (int j = 0; j < n; ++j)
                std::swap(a(col, j), a(pivot, j));
            det = -det;
        }
        det *= a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double factor = a(r, col) / a(col, col);
            for (int j = col; j < n; ++j)
                a(r, j) -= factor * a(col, j);
        }
    }
    return det;
}

inline RealMatrix values_of(const Matrix<Jet>& m)
{
    RealMatrix out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            out(i, j) = m(i, j).value();
    return out;
}

/// Largest absolute entry of a - b.
inline double max_abs_diff(const RealMatrix& a, const RealMatrix& b)
{
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline double max_abs(const RealMatrix& a)
{
    return max_abs_diff(a, RealMatrix(a.rows(), a.cols(), 0.0));
}

/// Dense cubic array indexed [i][j][k], all extents n.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}
    int dim() const noexcept { return n_; }
    double& operator()(int i, int j, int k) noexcept { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const noexcept { return data_[index(i, j, k)]; }
    friend bool operator==(const Tensor3&, const Tensor3&) = default;

private:
    std::size_t index(int i, int j, int k) const noexcept
    {
        return static_cast<std::size_t>((i * n_ + j) * n_ + k);
    }
    int n_ = 0;
    std::vector<double> data_;
};

/// Dense quartic array indexed [i][j][k][l], all extents n.
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n * n), 0.0) {}
    int dim() const noexcept { return n_; }
    double& operator()(int i, int j, int k, int l) noexcept { return data_[index(i, j, k, l)]; }
    double operator()(int i, int j, int k, int l) const noexcept { return data_[index(i, j, k, l)]; }

private:
    std::size_t index(int i, int j, int k, int l) const noexcept
    {
        return static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l);
    }
    int n_ = 0;
    std::vector<double> data_;
};

} // namespace solitonforge
