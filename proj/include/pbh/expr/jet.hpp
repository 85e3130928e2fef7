#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace pbh {

/**
 * Truncated multivariate Taylor polynomial ("jet") in up to kMaxVars seed variables,
 * complete through total degree `order()` <= kMaxOrder.
 *
 * Coefficients are Taylor coefficients, i.e. partial derivatives divided by the
 * multi-index factorial, stored densely in graded-lexicographic monomial order.
 * Because the order is graded, the coefficients of a lower-order truncation are a
 * prefix of the higher-order ones, so mixed-order arithmetic simply works on the
 * shorter prefix.
 *
 * A jet with zero seed variables is a plain constant that combines with jets of any
 * layout; `Jet(double)` constructs one, which is what lets numeric kernels be written
 * once over a generic scalar type.
 */
class Jet {
public:
    static constexpr int kMaxVars = 4;
    static constexpr int kMaxOrder = 4;
    static constexpr int kMaxCoeffs = 70; // C(kMaxVars + kMaxOrder, kMaxOrder)

    Jet() noexcept : Jet(0.0) {}
    Jet(double value) noexcept; // NOLINT(google-explicit-constructor)

    static Jet constant(double value, int nvars, int order);
    static Jet variable(double value, int var, int nvars, int order);

    int nvars() const noexcept { return nvars_; }
    int order() const noexcept { return order_; }
    int size() const noexcept;
    bool is_constant_layout() const noexcept { return nvars_ == 0; }

    double value() const noexcept { return c_[0]; }

    /// Taylor coefficient of the monomial with the given exponents (length nvars()).
    double coefficient(std::span<const int> exponents) const;
    /// Partial derivative with the given multi-index: coefficient times the multi-index factorial.
    double derivative(std::span<const int> exponents) const;
    /// Raw coefficient by graded-lex index.
    double operator[](int index) const noexcept { return c_[static_cast<std::size_t>(index)]; }

    /// d/dx_var, one order lower.
    Jet partial(int var) const;
    Jet truncated(int order) const;

    Jet operator-() const;
    Jet& operator+=(const Jet& other);
    Jet& operator-=(const Jet& other);
    Jet& operator*=(const Jet& other);
    Jet& operator/=(const Jet& other);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);

    friend Jet sqrt(const Jet& a);
    friend Jet exp(const Jet& a);
    friend Jet log(const Jet& a);
    friend Jet sin(const Jet& a);
    friend Jet cos(const Jet& a);
    friend Jet pow(const Jet& a, double exponent);
    friend Jet pow(const Jet& a, const Jet& exponent);
    /// |a|^q; not differentiable where a vanishes.
    friend Jet abs_pow(const Jet& a, double q);

    /// Number of monomials of total degree <= order in nvars variables.
    static int coefficient_count(int nvars, int order);
    /// Exponent vector of the monomial at a graded-lex index.
    static std::array<std::uint8_t, kMaxVars> exponents_of(int nvars, int index);

private:
    Jet(int nvars, int order) noexcept;

    // f_k = f^(k)(a0) / k! for k = 0..order(), applied to a - a0.
    Jet compose(std::span<const double> taylor) const;
    void adopt_layout(const Jet& other);

    std::uint8_t nvars_ = 0;
    std::uint8_t order_ = kMaxOrder;
    std::array<double, kMaxCoeffs> c_{};
};

double value_of(double x) noexcept;
double value_of(const Jet& x) noexcept;

double abs_pow(double a, double q);

} // namespace pbh
