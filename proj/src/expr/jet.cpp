#include "pbh/expr/jet.hpp"

#include "pbh/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>

namespace pbh {
namespace {

using Exponents = std::array<std::uint8_t, Jet::kMaxVars>;

struct Product {
    std::int16_t lhs;
    std::int16_t rhs;
    std::int16_t out;
};

struct Layout {
    std::vector<Exponents> monomials;
    std::array<int, Jet::kMaxOrder + 1> count{};
    // All (a, b, a+b) index triples with total degree <= kMaxOrder, sorted by `out`.
    std::vector<Product> products;
    // raise[index][var]: index of monomial + e_var, or -1 past kMaxOrder.
    std::vector<std::array<std::int16_t, Jet::kMaxVars>> raise;
    std::map<Exponents, int> index_of;
};

int degree(const Exponents& e) {
    int d = 0;
    for (auto v : e) d += v;
    return d;
}

void enumerate(int nvars, int var, int remaining, Exponents& current, std::vector<Exponents>& out) {
    if (var == nvars - 1) {
        current[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(remaining);
        out.push_back(current);
        current[static_cast<std::size_t>(var)] = 0;
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        current[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(k);
        enumerate(nvars, var + 1, remaining - k, current, out);
    }
    current[static_cast<std::size_t>(var)] = 0;
}

Layout build_layout(int nvars) {
    Layout layout;
    for (int d = 0; d <= Jet::kMaxOrder; ++d) {
        if (nvars == 0) {
            if (d == 0) layout.monomials.push_back(Exponents{});
        } else {
            Exponents current{};
            enumerate(nvars, 0, d, current, layout.monomials);
        }
        layout.count[static_cast<std::size_t>(d)] = static_cast<int>(layout.monomials.size());
    }
    for (std::size_t i = 0; i < layout.monomials.size(); ++i)
        layout.index_of.emplace(layout.monomials[i], static_cast<int>(i));

    const auto n = layout.monomials.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            Exponents sum{};
            for (int v = 0; v < Jet::kMaxVars; ++v)
                sum[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(
                    layout.monomials[a][static_cast<std::size_t>(v)] + layout.monomials[b][static_cast<std::size_t>(v)]);
            if (degree(sum) > Jet::kMaxOrder) continue;
            layout.products.push_back({static_cast<std::int16_t>(a), static_cast<std::int16_t>(b),
                                       static_cast<std::int16_t>(layout.index_of.at(sum))});
        }
    }
    std::stable_sort(layout.products.begin(), layout.products.end(),
                     [](const Product& x, const Product& y) { return x.out < y.out; });

    layout.raise.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int v = 0; v < Jet::kMaxVars; ++v) {
            layout.raise[i][static_cast<std::size_t>(v)] = -1;
            if (v >= nvars) continue;
            Exponents up = layout.monomials[i];
            ++up[static_cast<std::size_t>(v)];
            if (degree(up) <= Jet::kMaxOrder)
                layout.raise[i][static_cast<std::size_t>(v)] = static_cast<std::int16_t>(layout.index_of.at(up));
        }
    }
    return layout;
}

const Layout& layout_for(int nvars) {
    static const std::array<Layout, Jet::kMaxVars + 1> layouts = [] {
        std::array<Layout, Jet::kMaxVars + 1> all;
        for (int n = 0; n <= Jet::kMaxVars; ++n) all[static_cast<std::size_t>(n)] = build_layout(n);
        return all;
    }();
    return layouts[static_cast<std::size_t>(nvars)];
}

void check_layout(int nvars, int order) {
    if (nvars < 0 || nvars > Jet::kMaxVars)
        throw ConfigError("jet: seed variable count " + std::to_string(nvars) + " outside [0, " +
                          std::to_string(Jet::kMaxVars) + "]");
    if (order < 0 || order > Jet::kMaxOrder)
        throw ConfigError("jet: order " + std::to_string(order) + " outside [0, " +
                          std::to_string(Jet::kMaxOrder) + "]");
}

bool is_nonnegative_integer(double q) { return q >= 0.0 && std::floor(q) == q; }

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

} // namespace

Jet::Jet(double value) noexcept {
    c_[0] = value;
}

Jet::Jet(int nvars, int order) noexcept
    : nvars_(static_cast<std::uint8_t>(nvars)), order_(static_cast<std::uint8_t>(order)) {}

Jet Jet::constant(double value, int nvars, int order) {
    check_layout(nvars, order);
    Jet j(nvars, order);
    j.c_[0] = value;
    return j;
}

Jet Jet::variable(double value, int var, int nvars, int order) {
    check_layout(nvars, order);
    if (var < 0 || var >= nvars) throw ConfigError("jet: seed index out of range");
    Jet j(nvars, order);
    j.c_[0] = value;
    if (order >= 1) j.c_[static_cast<std::size_t>(1 + var)] = 1.0;
    return j;
}

int Jet::coefficient_count(int nvars, int order) {
    check_layout(nvars, order);
    return layout_for(nvars).count[static_cast<std::size_t>(order)];
}

std::array<std::uint8_t, Jet::kMaxVars> Jet::exponents_of(int nvars, int index) {
    return layout_for(nvars).monomials.at(static_cast<std::size_t>(index));
}

int Jet::size() const noexcept {
    return layout_for(nvars_).count[order_];
}

double Jet::coefficient(std::span<const int> exponents) const {
    if (static_cast<int>(exponents.size()) != nvars_) throw ConfigError("jet: multi-index length mismatch");
    Exponents e{};
    int total = 0;
    for (std::size_t v = 0; v < exponents.size(); ++v) {
        if (exponents[v] < 0) throw ConfigError("jet: negative exponent");
        e[v] = static_cast<std::uint8_t>(exponents[v]);
        total += exponents[v];
    }
    if (total > order_) throw ConfigError("jet: requested degree exceeds jet order");
    return c_[static_cast<std::size_t>(layout_for(nvars_).index_of.at(e))];
}

double Jet::derivative(std::span<const int> exponents) const {
    double scale = 1.0;
    for (int k : exponents) scale *= factorial(k);
    return coefficient(exponents) * scale;
}

Jet Jet::partial(int var) const {
    if (nvars_ == 0) return Jet(0.0);
    if (var < 0 || var >= nvars_) throw ConfigError("jet: partial with respect to an unseeded variable");
    if (order_ == 0) throw ConfigError("jet: cannot differentiate an order-0 jet");
    const auto& layout = layout_for(nvars_);
    Jet out(nvars_, order_ - 1);
    const int n = out.size();
    for (int i = 0; i < n; ++i) {
        const auto up = layout.raise[static_cast<std::size_t>(i)][static_cast<std::size_t>(var)];
        const double factor = layout.monomials[static_cast<std::size_t>(i)][static_cast<std::size_t>(var)] + 1.0;
        out.c_[static_cast<std::size_t>(i)] = factor * c_[static_cast<std::size_t>(up)];
    }
    return out;
}

Jet Jet::truncated(int order) const {
    if (nvars_ == 0) return *this;
    if (order > order_) throw ConfigError("jet: cannot raise the order of a jet");
    Jet out(nvars_, order);
    const int n = out.size();
    std::copy_n(c_.begin(), n, out.c_.begin());
    return out;
}

void Jet::adopt_layout(const Jet& other) {
    if (other.nvars_ == 0) {
        order_ = std::min(order_, other.order_);
        return;
    }
    if (nvars_ == 0) {
        nvars_ = other.nvars_;
        order_ = std::min(order_, other.order_);
        return;
    }
    if (nvars_ != other.nvars_) throw ConfigError("jet: mixing jets with different seed sets");
    order_ = std::min(order_, other.order_);
}

Jet Jet::operator-() const {
    Jet out = *this;
    const int n = size();
    for (int i = 0; i < n; ++i) out.c_[static_cast<std::size_t>(i)] = -c_[static_cast<std::size_t>(i)];
    return out;
}

Jet& Jet::operator+=(const Jet& other) {
    adopt_layout(other);
    const int n = other.nvars_ == 0 ? 1 : size();
    for (int i = 0; i < n; ++i) c_[static_cast<std::size_t>(i)] += other.c_[static_cast<std::size_t>(i)];
    return *this;
}

Jet& Jet::operator-=(const Jet& other) {
    adopt_layout(other);
    const int n = other.nvars_ == 0 ? 1 : size();
    for (int i = 0; i < n; ++i) c_[static_cast<std::size_t>(i)] -= other.c_[static_cast<std::size_t>(i)];
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    if (b.nvars_ == 0) {
        Jet out = a;
        out.order_ = std::min(a.order_, b.order_);
        const int n = out.size();
        for (int i = 0; i < n; ++i) out.c_[static_cast<std::size_t>(i)] *= b.c_[0];
        return out;
    }
    if (a.nvars_ == 0) return b * a;
    Jet out = a;
    out.adopt_layout(b);
    const int n = out.size();
    std::fill_n(out.c_.begin(), n, 0.0);
    for (const auto& p : layout_for(out.nvars_).products) {
        if (p.out >= n) break;
        out.c_[static_cast<std::size_t>(p.out)] +=
            a.c_[static_cast<std::size_t>(p.lhs)] * b.c_[static_cast<std::size_t>(p.rhs)];
    }
    return out;
}

Jet& Jet::operator*=(const Jet& other) {
    *this = *this * other;
    return *this;
}

Jet operator/(const Jet& a, const Jet& b) {
    if (b.c_[0] == 0.0) throw DomainError("division by zero");
    if (b.nvars_ == 0) {
        Jet out = a;
        out.order_ = std::min(a.order_, b.order_);
        const int n = out.size();
        for (int i = 0; i < n; ++i) out.c_[static_cast<std::size_t>(i)] /= b.c_[0];
        return out;
    }
    // q * b = a solved coefficient by coefficient in graded order.
    Jet out = a;
    out.adopt_layout(b);
    const int n = out.size();
    const bool a_const = a.nvars_ == 0;
    for (int i = 0; i < n; ++i) out.c_[static_cast<std::size_t>(i)] = (a_const && i > 0) ? 0.0 : a.c_[static_cast<std::size_t>(i)];
    const auto& products = layout_for(out.nvars_).products;
    std::size_t k = 0;
    for (int target = 0; target < n; ++target) {
        double acc = out.c_[static_cast<std::size_t>(target)];
        for (; k < products.size() && products[k].out == target; ++k) {
            if (products[k].rhs == 0) continue;
            acc -= out.c_[static_cast<std::size_t>(products[k].lhs)] * b.c_[static_cast<std::size_t>(products[k].rhs)];
        }
        out.c_[static_cast<std::size_t>(target)] = acc / b.c_[0];
    }
    return out;
}

Jet& Jet::operator/=(const Jet& other) {
    *this = *this / other;
    return *this;
}

Jet Jet::compose(std::span<const double> taylor) const {
    Jet delta = *this;
    delta.c_[0] = 0.0;
    const int k_max = order_;
    if (nvars_ == 0) return Jet(taylor[0]);
    Jet result = Jet::constant(taylor[static_cast<std::size_t>(k_max)], nvars_, order_);
    for (int k = k_max - 1; k >= 0; --k) {
        result = result * delta;
        result.c_[0] += taylor[static_cast<std::size_t>(k)];
    }
    return result;
}

Jet sqrt(const Jet& a) {
    const double a0 = a.value();
    if (a0 < 0.0) throw DomainError("sqrt of a negative number");
    if (a.nvars_ == 0 || a.order_ == 0) {
        Jet out = a;
        out.c_[0] = std::sqrt(a0);
        return out;
    }
    if (a0 == 0.0) throw DomainError("sqrt is not differentiable at 0");
    std::array<double, Jet::kMaxOrder + 1> t{};
    t[0] = std::sqrt(a0);
    double coeff = 1.0;
    for (int k = 1; k <= a.order_; ++k) {
        coeff *= (0.5 - (k - 1)) / k;
        t[static_cast<std::size_t>(k)] = coeff * t[0] / std::pow(a0, k);
    }
    return a.compose(t);
}

Jet exp(const Jet& a) {
    std::array<double, Jet::kMaxOrder + 1> t{};
    const double e = std::exp(a.value());
    for (int k = 0; k <= a.order_; ++k) t[static_cast<std::size_t>(k)] = e / factorial(k);
    return a.compose(t);
}

Jet log(const Jet& a) {
    const double a0 = a.value();
    if (a0 <= 0.0) throw DomainError("log of a non-positive number");
    std::array<double, Jet::kMaxOrder + 1> t{};
    t[0] = std::log(a0);
    for (int k = 1; k <= a.order_; ++k)
        t[static_cast<std::size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) / (k * std::pow(a0, k));
    return a.compose(t);
}

Jet sin(const Jet& a) {
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    const std::array<double, 4> cycle{s, c, -s, -c};
    std::array<double, Jet::kMaxOrder + 1> t{};
    for (int k = 0; k <= a.order_; ++k) t[static_cast<std::size_t>(k)] = cycle[static_cast<std::size_t>(k % 4)] / factorial(k);
    return a.compose(t);
}

Jet cos(const Jet& a) {
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    const std::array<double, 4> cycle{c, -s, -c, s};
    std::array<double, Jet::kMaxOrder + 1> t{};
    for (int k = 0; k <= a.order_; ++k) t[static_cast<std::size_t>(k)] = cycle[static_cast<std::size_t>(k % 4)] / factorial(k);
    return a.compose(t);
}

Jet pow(const Jet& a, double exponent) {
    const double a0 = a.value();
    const bool integral = std::floor(exponent) == exponent;
    if (a0 < 0.0 && !integral) throw DomainError("negative base raised to a non-integer power");
    std::array<double, Jet::kMaxOrder + 1> t{};
    t[0] = std::pow(a0, exponent);
    if (a0 == 0.0 && exponent < 0.0) throw DomainError("zero raised to a negative power");
    const int order = (a.nvars_ == 0) ? 0 : a.order_;
    double binom = 1.0;
    for (int k = 1; k <= order; ++k) {
        binom *= (exponent - (k - 1)) / k;
        if (is_nonnegative_integer(exponent) && k > exponent) {
            t[static_cast<std::size_t>(k)] = 0.0;
            continue;
        }
        if (a0 == 0.0 && !is_nonnegative_integer(exponent)) throw DomainError("power is not differentiable at 0 for this exponent");
        t[static_cast<std::size_t>(k)] = binom * std::pow(a0, exponent - k);
    }
    return a.compose(t);
}

Jet pow(const Jet& a, const Jet& exponent) {
    if (exponent.nvars_ == 0) return pow(a, exponent.value());
    bool constant = true;
    const int n = exponent.size();
    for (int i = 1; i < n; ++i) constant = constant && exponent.c_[static_cast<std::size_t>(i)] == 0.0;
    if (constant) return pow(a, exponent.value());
    return exp(exponent * log(a));
}

Jet abs_pow(const Jet& a, double q) {
    const double a0 = a.value();
    if (a0 > 0.0) return pow(a, q);
    if (a0 < 0.0) return pow(-a, q);
    if ((a.nvars_ == 0 || a.order_ == 0) && q > 0.0) return a * 0.0;
    throw DomainError("abs-power evaluated at 0");
}

double abs_pow(double a, double q) {
    if (a == 0.0 && q <= 0.0) throw DomainError("abs-power evaluated at 0");
    return std::pow(std::fabs(a), q);
}

double value_of(double x) noexcept { return x; }
double value_of(const Jet& x) noexcept { return x.value(); }

} // namespace pbh
