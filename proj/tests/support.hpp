#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "drcbf/acc.hpp"
#include "drcbf/field.hpp"

namespace drcbf::testing {

/// Central differences with a step scaled to each coordinate.
inline Eigen::RowVectorXd finite_difference_gradient(const std::function<double(const StateVector&)>& f,
                                                     const StateVector& x, double step = 1e-5)
{
    Eigen::RowVectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x[i]));
        StateVector lo = x, hi = x;
        lo[i] -= h;
        hi[i] += h;
        g[i] = (f(hi) - f(lo)) / (2.0 * h);
    }
    return g;
}

inline double relative_error(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b)
{
    return (a - b).norm() / std::max(1.0, b.norm());
}

/// Max relative gradient error of `field` over `states`.
inline double gradient_error(const Field& field, const std::vector<StateVector>& states)
{
    double worst = 0.0;
    for (const auto& x : states) {
        const auto fd = finite_difference_gradient([&](const StateVector& y) { return field.value(y); }, x);
        worst = std::max(worst, relative_error(field.gradient(x), fd));
    }
    return worst;
}

inline StateVector state(double D, double v)
{
    StateVector x(2);
    x << D, v;
    return x;
}

/// xdot = (x2, u), a double integrator with one disturbance on the second row.
inline SystemPtr double_integrator(int ird = 2, int drd = 2)
{
    auto f = [](std::span<const Jet> x) { return std::vector<Jet>{x[1], Jet(x[0].layout(), 0.0)}; };
    auto g = [](std::span<const Jet> x) {
        return std::vector<Jet>{Jet(x[0].layout(), 0.0), Jet(x[0].layout(), 1.0)};
    };
    auto h = [](std::span<const Jet> x) {
        return std::vector<Jet>{Jet(x[0].layout(), 0.0), Jet(x[0].layout(), 1.0)};
    };
    return std::make_shared<const ControlAffineSystem>(2, 1, 1, f, g, h, ird, drd);
}

}  // namespace drcbf::testing
