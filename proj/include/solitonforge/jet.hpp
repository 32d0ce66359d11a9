#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "solitonforge/error.hpp"

namespace solitonforge {

/**
 * Truncated Taylor expansion of a scalar field at a point.
 *
 * Holds the value, the gradient, the Hessian (order >= 2) and the fully
 * symmetric third-derivative tensor (order 3), all in dense storage laid out
 * as [value | grad(n) | hess(n*n) | third(n*n*n)]. Arithmetic propagates the
 * Leibniz and chain rules up to the jet's order, so composed expressions are
 * differentiated exactly (up to round-off).
 *
 * Order 0 is accepted as a plain value carrier; it appears when a jet is
 * differentiated down to nothing (see derivative()).
 *
 * Small jets (dim <= 4, order <= 2) live in an inline buffer; larger ones
 * spill to the heap.
 */
class Jet {
public:
    static constexpr int kMaxOrder = 3;

    Jet() : Jet(1, 0) {}

    Jet(int dim, int order) : dim_(dim), order_(order)
    {
        if (dim < 1)
            throw std::invalid_argument("jet dimension must be >= 1");
        if (order < 0 || order > kMaxOrder)
            throw std::invalid_argument("jet order must be in [0, 3]");
        size_ = storage_size(dim, order);
        if (size_ > kInline)
            heap_.assign(size_, 0.0);
        else
            inline_.fill(0.0);
    }

    static Jet constant(double value, int dim, int order)
    {
        Jet j(dim, order);
        j.data()[0] = value;
        return j;
    }

    /// The coordinate function x_k expanded at `point`.
    static Jet variable(std::span<const double> point, int k, int order)
    {
        const int n = static_cast<int>(point.size());
        if (k < 0 || k >= n)
            throw std::out_of_range("seed variable index " + std::to_string(k) +
                                    " out of range for dimension " + std::to_string(n));
        Jet j(n, order);
        j.data()[0] = point[static_cast<std::size_t>(k)];
        if (order >= 1)
            j.data()[1 + k] = 1.0;
        return j;
    }

    static constexpr std::size_t storage_size(int n, int order) noexcept
    {
        std::size_t s = 1;
        std::size_t term = 1;
        for (int o = 1; o <= order; ++o) {
            term *= static_cast<std::size_t>(n);
            s += term;
        }
        return s;
    }

    int dim() const noexcept { return dim_; }
    int order() const noexcept { return order_; }

    double value() const noexcept { return data()[0]; }
    double grad(int i) const noexcept { return data()[grad_at(i)]; }
    double hess(int i, int j) const noexcept { return data()[hess_at(i, j)]; }
    double third(int i, int j, int k) const noexcept { return data()[third_at(i, j, k)]; }

    std::span<const double> coefficients() const noexcept { return {data(), size_}; }

    /// True when every derivative part vanishes exactly.
    bool is_constant() const noexcept
    {
        return std::all_of(data() + 1, data() + size_, [](double v) { return v == 0.0; });
    }

    /// Partial derivative along coordinate k, one order lower.
    Jet derivative(int k) const
    {
        if (order_ < 1)
            throw std::invalid_argument("cannot differentiate an order-0 jet");
        if (k < 0 || k >= dim_)
            throw std::out_of_range("derivative index out of range");
        Jet r(dim_, order_ - 1);
        double* out = r.data();
        out[0] = grad(k);
        if (order_ >= 2)
            for (int i = 0; i < dim_; ++i)
                out[1 + i] = hess(k, i);
        if (order_ >= 3)
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j)
                    out[r.hess_at(i, j)] = third(k, i, j);
        return r;
    }

    /// Drops every part above `order`.
    Jet truncated(int order) const
    {
        if (order > order_)
            throw std::invalid_argument("cannot raise jet order by truncation");
        Jet r(dim_, order);
        std::copy_n(data(), r.size_, r.data());
        return r;
    }

    Jet operator-() const
    {
        Jet r(*this);
        for (std::size_t i = 0; i < size_; ++i)
            r.data()[i] = -r.data()[i];
        return r;
    }

    Jet& operator+=(const Jet& b)
    {
        check_compatible(b);
        for (std::size_t i = 0; i < size_; ++i)
            data()[i] += b.data()[i];
        return *this;
    }

    Jet& operator-=(const Jet& b)
    {
        check_compatible(b);
        for (std::size_t i = 0; i < size_; ++i)
            data()[i] -= b.data()[i];
        return *this;
    }

    Jet& operator+=(double b) noexcept
    {
        data()[0] += b;
        return *this;
    }

    Jet& operator-=(double b) noexcept
    {
        data()[0] -= b;
        return *this;
    }

    Jet& operator*=(double b) noexcept
    {
        for (std::size_t i = 0; i < size_; ++i)
            data()[i] *= b;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double b) { return a += b; }
    friend Jet operator+(double a, Jet b) { return b += a; }
    friend Jet operator-(Jet a, double b) { return a -= b; }
    friend Jet operator-(double a, const Jet& b) { return -b + a; }
    friend Jet operator*(Jet a, double b) { return a *= b; }
    friend Jet operator*(double a, Jet b) { return b *= a; }

    friend Jet operator*(const Jet& a, const Jet& b)
    {
        a.check_compatible(b);
        const int n = a.dim_;
        Jet r(n, a.order_);
        double* c = r.data();
        const double a0 = a.value();
        const double b0 = b.value();
        c[0] = a0 * b0;
        if (a.order_ >= 1)
            for (int i = 0; i < n; ++i)
                c[1 + i] = a.grad(i) * b0 + a0 * b.grad(i);
        if (a.order_ >= 2)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    c[r.hess_at(i, j)] = a.hess(i, j) * b0 + a.grad(i) * b.grad(j) +
                                         a.grad(j) * b.grad(i) + a0 * b.hess(i, j);
        if (a.order_ >= 3)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        c[r.third_at(i, j, k)] =
                            a.third(i, j, k) * b0 + a.hess(i, j) * b.grad(k) +
                            a.hess(i, k) * b.grad(j) + a.hess(j, k) * b.grad(i) +
                            a.grad(i) * b.hess(j, k) + a.grad(j) * b.hess(i, k) +
                            a.grad(k) * b.hess(i, j) + a0 * b.third(i, j, k);
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b)
    {
        Jet r = a * reciprocal(b);
        r.data()[0] = a.value() / b.value();
        return r;
    }

    friend Jet operator/(Jet a, double b)
    {
        if (b == 0.0)
            throw DomainError("jet division by zero");
        const double v = a.value() / b;
        a *= 1.0 / b;
        a.data()[0] = v;
        return a;
    }

    friend Jet operator/(double a, const Jet& b)
    {
        Jet r = reciprocal(b) *= a;
        r.data()[0] = a / b.value();
        return r;
    }

    Jet& operator*=(const Jet& b) { return *this = *this * b; }
    Jet& operator/=(const Jet& b) { return *this = *this / b; }

    friend Jet reciprocal(const Jet& a)
    {
        const double u = a.value();
        if (u == 0.0)
            throw DomainError("jet division by zero");
        const double inv = 1.0 / u;
        return a.compose({inv, -inv * inv, 2.0 * inv * inv * inv, -6.0 * inv * inv * inv * inv});
    }

    friend Jet exp(const Jet& a)
    {
        const double e = std::exp(a.value());
        return a.compose({e, e, e, e});
    }

    friend Jet log(const Jet& a)
    {
        const double u = a.value();
        if (!(u > 0.0))
            throw DomainError("ln of non-positive value " + std::to_string(u));
        const double inv = 1.0 / u;
        return a.compose({std::log(u), inv, -inv * inv, 2.0 * inv * inv * inv});
    }

    friend Jet sqrt(const Jet& a)
    {
        const double u = a.value();
        if (!(u > 0.0))
            throw DomainError("sqrt of non-positive value " + std::to_string(u));
        const double s = std::sqrt(u);
        return a.compose({s, 0.5 / s, -0.25 / (s * u), 0.375 / (s * u * u)});
    }

    friend Jet sin(const Jet& a)
    {
        const double s = std::sin(a.value());
        const double c = std::cos(a.value());
        return a.compose({s, c, -s, -c});
    }

    friend Jet cos(const Jet& a)
    {
        const double s = std::sin(a.value());
        const double c = std::cos(a.value());
        return a.compose({c, -s, -c, s});
    }

    /// a^c for a real exponent. Integer exponents accept any base (except 0
    /// with c < 0); non-integer exponents require a > 0.
    friend Jet pow(const Jet& a, double c)
    {
        const double u = a.value();
        const bool integral = std::floor(c) == c;
        if (!integral && !(u > 0.0))
            throw DomainError("non-integer power of non-positive value " + std::to_string(u));
        if (u == 0.0 && c < 0.0)
            throw DomainError("negative power of zero");
        std::array<double, 4> d{};
        double falling = 1.0;
        for (int k = 0; k <= 3; ++k) {
            d[static_cast<std::size_t>(k)] = falling == 0.0 ? 0.0 : falling * std::pow(u, c - k);
            falling *= (c - k);
        }
        return a.compose(d);
    }

    /// a^b with a jet exponent: constant exponents use the power rule,
    /// otherwise exp(b ln a) with a > 0.
    friend Jet pow(const Jet& a, const Jet& b)
    {
        a.check_compatible(b);
        if (b.is_constant())
            return pow(a, b.value());
        return exp(b * log(a));
    }

    /// f(a) given f and its first three derivatives at a.value().
    Jet compose(const std::array<double, 4>& d) const
    {
        const int n = dim_;
        Jet r(n, order_);
        double* c = r.data();
        c[0] = d[0];
        if (order_ >= 1)
            for (int i = 0; i < n; ++i)
                c[1 + i] = d[1] * grad(i);
        if (order_ >= 2)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    c[r.hess_at(i, j)] = d[2] * grad(i) * grad(j) + d[1] * hess(i, j);
        if (order_ >= 3)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        c[r.third_at(i, j, k)] =
                            d[3] * grad(i) * grad(j) * grad(k) +
                            d[2] * (hess(i, j) * grad(k) + hess(i, k) * grad(j) +
                                    hess(j, k) * grad(i)) +
                            d[1] * third(i, j, k);
        return r;
    }

private:
    static constexpr std::size_t kInline = 21; // dim 4, order 2

    const double* data() const noexcept { return size_ > kInline ? heap_.data() : inline_.data(); }
    double* data() noexcept { return size_ > kInline ? heap_.data() : inline_.data(); }

    std::size_t grad_at(int i) const noexcept { return 1 + static_cast<std::size_t>(i); }
    std::size_t hess_at(int i, int j) const noexcept
    {
        return 1 + static_cast<std::size_t>(dim_ + i * dim_ + j);
    }
    std::size_t third_at(int i, int j, int k) const noexcept
    {
        return 1 + static_cast<std::size_t>(dim_ + dim_ * dim_ + (i * dim_ + j) * dim_ + k);
    }

    void check_compatible(const Jet& b) const
    {
        if (dim_ != b.dim_ || order_ != b.order_)
            throw std::invalid_argument("jet dimension/order mismatch");
    }

    int dim_;
    int order_;
    std::size_t size_;
    std::array<double, kInline> inline_;
    std::vector<double> heap_;
};

} // namespace solitonforge
