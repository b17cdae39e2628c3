#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace drcbf {

/// Multi-index tables for truncated Taylor polynomials in `nvars` variables
/// up to total degree `order`.
///
/// Monomials are enumerated by total degree, then lexicographically, so the
/// layout of order K-1 is a prefix of the layout of order K. Layouts are
/// interned and shared; they are immutable once published.
class JetLayout {
public:
    static std::shared_ptr<const JetLayout> get(int nvars, int order);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    std::size_t size() const { return exponents_.size(); }

    std::span<const int> exponent(std::size_t index) const;
    std::size_t unit_index(int var) const { return 1 + static_cast<std::size_t>(var); }
    /// Number of monomials of total degree <= `order` (prefix length).
    std::size_t prefix_size(int order) const { return degree_offsets_[order + 1]; }

    struct Product {
        std::size_t lhs, rhs, out;
    };
    std::span<const Product> products() const { return products_; }

    struct DerivativeTerm {
        std::size_t source;
        double factor;
    };
    /// Entry j gives the coefficient of monomial j (in the order-1 layout) of
    /// d/dx_var in terms of this layout's coefficients.
    std::span<const DerivativeTerm> derivative(int var) const { return derivatives_[var]; }

    JetLayout(int nvars, int order);

private:
    int nvars_;
    int order_;
    std::vector<int> exponents_flat_;
    std::vector<std::vector<int>> exponents_;
    std::vector<std::size_t> degree_offsets_;
    std::vector<Product> products_;
    std::vector<std::vector<DerivativeTerm>> derivatives_;
};

/// Truncated multivariate Taylor expansion of a scalar quantity around a
/// point: value, gradient, and higher coefficients up to the layout order.
///
/// Coefficients are Taylor coefficients (c_alpha with P(x + dx) = sum c_alpha dx^alpha),
/// not raw partial derivatives. Mixing operands of different orders truncates
/// to the smaller one.
class Jet {
public:
    Jet() = default;
    Jet(std::shared_ptr<const JetLayout> layout, double value);

    static Jet variable(std::shared_ptr<const JetLayout> layout, double value, int var);

    double value() const { return coeffs_[0]; }
    int order() const { return layout_->order(); }
    int nvars() const { return layout_->nvars(); }
    const std::shared_ptr<const JetLayout>& layout() const { return layout_; }
    std::span<const double> coefficients() const { return coeffs_; }
    /// Partial derivative of the value with respect to `var` (needs order >= 1).
    double partial(int var) const;

    Jet truncated(int order) const;
    /// Exact d/dx_var; the result has one order less.
    Jet derivative(int var) const;

    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator*=(const Jet& rhs);
    Jet& operator+=(double rhs);
    Jet& operator-=(double rhs);
    Jet& operator*=(double rhs);
    Jet& operator/=(double rhs);
    Jet operator-() const;

    /// Applies a univariate function given its derivatives at value():
    /// sum_k derivs[k] / k! * (a - a0)^k. `derivs` must hold order()+1 entries.
    Jet compose(std::span<const double> derivs) const;

private:
    Jet(std::shared_ptr<const JetLayout> layout, std::vector<double> coeffs)
        : layout_(std::move(layout)), coeffs_(std::move(coeffs))
    {
    }
    friend Jet operator*(const Jet& lhs, const Jet& rhs);

    std::shared_ptr<const JetLayout> layout_;
    std::vector<double> coeffs_;
};

Jet operator+(Jet lhs, const Jet& rhs);
Jet operator-(Jet lhs, const Jet& rhs);
Jet operator*(const Jet& lhs, const Jet& rhs);
Jet operator/(const Jet& lhs, const Jet& rhs);
Jet operator+(Jet lhs, double rhs);
Jet operator+(double lhs, Jet rhs);
Jet operator-(Jet lhs, double rhs);
Jet operator-(double lhs, const Jet& rhs);
Jet operator*(Jet lhs, double rhs);
Jet operator*(double lhs, Jet rhs);
Jet operator/(Jet lhs, double rhs);
Jet operator/(double lhs, const Jet& rhs);

Jet reciprocal(const Jet& a);
Jet square(const Jet& a);
Jet pow(const Jet& a, int exponent);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

}  // namespace drcbf
