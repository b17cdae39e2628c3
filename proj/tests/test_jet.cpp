#include <doctest.h>

#include <cmath>
#include <random>

#include "drcbf/jet.hpp"

using namespace drcbf;

namespace {

// d^k/dx^k of a univariate jet at its expansion point.
double nth_derivative(Jet j, int k)
{
    for (int i = 0; i < k; ++i) j = j.derivative(0);
    return j.value();
}

}  // namespace

TEST_CASE("layout enumerates monomials by degree and prefixes lower orders")
{
    const auto l3 = JetLayout::get(2, 3);
    const auto l2 = JetLayout::get(2, 2);
    CHECK(l3->size() == 10);
    CHECK(l2->size() == 6);
    CHECK(l3->prefix_size(2) == l2->size());
    for (std::size_t i = 0; i < l2->size(); ++i) {
        const auto a = l3->exponent(i), b = l2->exponent(i);
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
    CHECK(JetLayout::get(2, 3) == l3);
}

TEST_CASE("product of variables carries value and gradient")
{
    const auto layout = JetLayout::get(2, 2);
    const Jet x = Jet::variable(layout, 2.0, 0);
    const Jet y = Jet::variable(layout, 3.0, 1);
    const Jet p = x * y;
    CHECK(p.value() == 6.0);
    CHECK(p.partial(0) == 3.0);
    CHECK(p.partial(1) == 2.0);
    // Mixed second derivative of xy is 1.
    CHECK(p.derivative(0).partial(1) == doctest::Approx(1.0));
}

TEST_CASE("univariate functions match analytic derivatives through order 4")
{
    const auto layout = JetLayout::get(1, 4);
    const double a = 0.7;
    const Jet x = Jet::variable(layout, a, 0);

    const Jet e = exp(x);
    for (int k = 0; k <= 4; ++k) CHECK(nth_derivative(e, k) == doctest::Approx(std::exp(a)).epsilon(1e-12));

    const Jet s = sin(x);
    const double sin_d[] = {std::sin(a), std::cos(a), -std::sin(a), -std::cos(a), std::sin(a)};
    for (int k = 0; k <= 4; ++k) CHECK(nth_derivative(s, k) == doctest::Approx(sin_d[k]).epsilon(1e-12));

    const Jet c = cos(x);
    const double cos_d[] = {std::cos(a), -std::sin(a), -std::cos(a), std::sin(a), std::cos(a)};
    for (int k = 0; k <= 4; ++k) CHECK(nth_derivative(c, k) == doctest::Approx(cos_d[k]).epsilon(1e-12));

    const Jet lg = log(x);
    const double log_d[] = {std::log(a), 1 / a, -1 / (a * a), 2 / (a * a * a), -6 / std::pow(a, 4)};
    for (int k = 0; k <= 4; ++k) CHECK(nth_derivative(lg, k) == doctest::Approx(log_d[k]).epsilon(1e-12));

    const Jet r = reciprocal(x);
    const double rec_d[] = {1 / a, -1 / (a * a), 2 / std::pow(a, 3), -6 / std::pow(a, 4), 24 / std::pow(a, 5)};
    for (int k = 0; k <= 4; ++k) CHECK(nth_derivative(r, k) == doctest::Approx(rec_d[k]).epsilon(1e-12));

    const Jet q = sqrt(x);
    CHECK(nth_derivative(q, 1) == doctest::Approx(0.5 / std::sqrt(a)).epsilon(1e-12));
    CHECK(nth_derivative(q, 2) == doctest::Approx(-0.25 * std::pow(a, -1.5)).epsilon(1e-12));

    const Jet cube = pow(x, 3);
    CHECK(nth_derivative(cube, 1) == doctest::Approx(3 * a * a).epsilon(1e-12));
    CHECK(nth_derivative(cube, 3) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(nth_derivative(cube, 4) == doctest::Approx(0.0));
}

TEST_CASE("division and scalar operations")
{
    const auto layout = JetLayout::get(2, 2);
    const Jet x = Jet::variable(layout, 1.5, 0);
    const Jet y = Jet::variable(layout, -0.5, 1);
    const Jet q = (x + 2.0) / (y * y + 1.0);
    const double den = 0.25 + 1.0;
    CHECK(q.value() == doctest::Approx(3.5 / den));
    CHECK(q.partial(0) == doctest::Approx(1.0 / den));
    CHECK(q.partial(1) == doctest::Approx(-3.5 * 2 * (-0.5) / (den * den)));
    const Jet z = 3.0 - x * 2.0 + 1.0 / x;
    CHECK(z.partial(0) == doctest::Approx(-2.0 - 1.0 / (1.5 * 1.5)));
}

TEST_CASE("mixing orders truncates to the smaller one")
{
    const Jet a = Jet::variable(JetLayout::get(2, 3), 1.0, 0);
    const Jet b = Jet::variable(JetLayout::get(2, 1), 2.0, 1);
    const Jet p = a * b;
    CHECK(p.order() == 1);
    CHECK(p.partial(0) == 2.0);
    CHECK(p.partial(1) == 1.0);
    CHECK(a.truncated(1).order() == 1);
}

TEST_CASE("product rule holds for random polynomials")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const auto layout = JetLayout::get(3, 3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Jet> v;
        for (int i = 0; i < 3; ++i) v.push_back(Jet::variable(layout, u(rng), i));
        const Jet a = v[0] * v[1] + u(rng) * v[2] * v[2] * v[0] + u(rng);
        const Jet b = sin(v[1]) * v[2] + exp(v[0] * u(rng));
        for (int var = 0; var < 3; ++var) {
            const Jet lhs = (a * b).derivative(var);
            const Jet rhs = a.derivative(var) * b + a * b.derivative(var);
            REQUIRE(lhs.coefficients().size() == rhs.coefficients().size());
            for (std::size_t k = 0; k < lhs.coefficients().size(); ++k) {
                CHECK(lhs.coefficients()[k] == doctest::Approx(rhs.coefficients()[k]).epsilon(1e-10));
            }
        }
    }
}
