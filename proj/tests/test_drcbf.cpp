#include <doctest.h>

#include <random>

#include "drcbf/errors.hpp"
#include "support.hpp"

using namespace drcbf;
using drcbf::testing::state;

namespace {

const AccParameters kAcc;
const double kCase1Bound = std::sqrt(25.0 + 20.25);

DrcbfChain acc_chain(const AccParameters& p, double D)
{
    const auto samples = acc_sample_states(p, 50, 3);
    return build_drcbf_chain(acc_system(p), acc_barrier(p), coefficients_from_poles(p.poles), p.k, D, samples);
}

// xdot = u on the line.
SystemPtr integrator()
{
    auto zero = [](std::span<const Jet> x) { return std::vector<Jet>{Jet(x[0].layout(), 0.0)}; };
    auto one = [](std::span<const Jet> x) { return std::vector<Jet>{Jet(x[0].layout(), 1.0)}; };
    return std::make_shared<const ControlAffineSystem>(1, 1, 1, zero, one, zero, 1, 1);
}

}  // namespace

TEST_CASE("ACC chain reproduces the hand-derived terms")
{
    const auto chain = acc_chain(kAcc, kCase1Bound);
    const auto x0 = state(100.0, 13.89);
    CHECK(chain.w(1).value(x0) == doctest::Approx(3.61).epsilon(1e-13));
    // F_r(13.89) = 0.1 + 5 * 13.89 + 0.25 * 13.89^2 = 117.783025.
    CHECK(chain.w(2).value(x0) == doctest::Approx(117.783025 / 1650.0 - 2.5).epsilon(1e-13));
    CHECK(chain.w(2).value(x0) == doctest::Approx(-2.42861).epsilon(1e-5));
    CHECK(chain.beta_u(x0)[0] == doctest::Approx(-1.0 / 1650.0).epsilon(1e-15));

    double worst = 0.0;
    for (const auto& x : acc_sample_states(kAcc, 100, 8)) {
        const auto ref = closed_form_drcbf_terms(kAcc, x, kCase1Bound);
        const auto c = drcbf_constraint(chain, x);
        worst = std::max({worst, std::abs(chain.w(1).value(x) - ref.w1), std::abs(chain.w(2).value(x) - ref.w2),
                          std::abs(chain.tilde_b(1).value(x) - ref.tilde_b1), std::abs(c.row[0] - ref.row),
                          std::abs(c.offset - ref.offset)});
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("large k1 removes the Young penalty from w1")
{
    AccParameters p;
    p.k = {1e12, 0.1};
    const auto x = state(50.0, 12.0);
    const auto chain = acc_chain(p, 1.0);
    CHECK(chain.w(1).value(x) == doctest::Approx(p.lead_speed - 12.0).epsilon(1e-10));
}

TEST_CASE("without disturbance channels and bound the chain is the nominal one")
{
    AccParameters p;
    p.disturbance_channels = false;
    const auto chain = acc_chain(p, 0.0);
    const HocbfChain nominal(acc_system(p), acc_barrier(p), coefficients_from_poles(p.poles));
    const auto sys = acc_system(p);
    for (const auto& x : acc_sample_states(p, 100, 4)) {
        CHECK(chain.tilde_b(1).value(x) == doctest::Approx(lie_f(chain.tilde_b(0), *sys, x)).epsilon(1e-14));
        const auto a = drcbf_constraint(chain, x), b = nominal.constraint(x);
        CHECK(a.row[0] == doctest::Approx(b.row[0]).epsilon(1e-14));
        CHECK(std::abs(a.offset - b.offset) <= 1e-9 * std::max(1.0, std::abs(b.offset)));
        CHECK(chain.phi(1).value(x) == doctest::Approx(nominal.theta(1).value(x)).epsilon(1e-12));
    }
}

TEST_CASE("constraint is affine in u")
{
    const auto chain = acc_chain(kAcc, kCase1Bound);
    const auto x = state(40.0, 18.0);
    const auto c = drcbf_constraint(chain, x);
    Eigen::VectorXd u(1);
    u << 321.0;
    CHECK(c.lhs(2.0 * u) == 2.0 * c.lhs(u));
    CHECK(chain.tilde_b_value(2, x, u) ==
          doctest::Approx(chain.w(2).value(x) - chain.gains()[1] * kCase1Bound * kCase1Bound + c.row.dot(u)));
}

TEST_CASE("invalid construction inputs are rejected")
{
    const auto sys = acc_system(kAcc);
    const auto b = acc_barrier(kAcc);
    const auto coeffs = coefficients_from_poles(kAcc.poles);
    const auto samples = acc_sample_states(kAcc, 10, 1);
    const std::vector<double> zero_k{0.1, 0.0};
    CHECK_THROWS_AS(build_drcbf_chain(sys, b, coeffs, zero_k, 1.0, samples), ValidationError);
    CHECK_THROWS_AS(build_drcbf_chain(sys, b, coeffs, kAcc.k, -1.0, samples), ValidationError);
    CHECK_THROWS_AS(build_drcbf_chain(sys, b, coeffs, kAcc.k, 1.0, {}), ValidationError);
    const std::vector<double> one_k{0.1};
    CHECK_THROWS_AS(build_drcbf_chain(sys, b, coeffs, one_k, 1.0, samples), DimensionError);

    // b = v_f has input relative degree 1, not the declared 2.
    const auto speed = Field::from_expression(2, [](std::span<const Jet> x) { return x[1] + 100.0; });
    CHECK_THROWS_AS(build_drcbf_chain(sys, speed, coeffs, kAcc.k, 1.0, samples), ValidationError);
}

TEST_CASE("vanishing input row raises a degenerate-constraint error")
{
    // xdot = (x2, x1 u): control authority disappears on x1 = 0.
    auto f = [](std::span<const Jet> x) { return std::vector<Jet>{x[1], Jet(x[0].layout(), 0.0)}; };
    auto g = [](std::span<const Jet> x) { return std::vector<Jet>{Jet(x[0].layout(), 0.0), x[0]}; };
    auto h = [](std::span<const Jet> x) { return std::vector<Jet>{Jet(x[0].layout(), 0.0), Jet(x[0].layout(), 1.0)}; };
    const auto sys = std::make_shared<const ControlAffineSystem>(2, 1, 1, f, g, h, 2, 2);
    const auto b = Field::coordinate(2, 0);
    const std::vector<StateVector> samples{state(1.0, 0.0), state(2.0, 1.0)};
    const std::vector<double> k{1.0, 1.0}, poles{1.0, 2.0};
    const auto chain = build_drcbf_chain(sys, b, coefficients_from_poles(poles), k, 0.5, samples);
    CHECK_NOTHROW(drcbf_constraint(chain, state(1.0, 0.0)));
    try {
        (void)drcbf_constraint(chain, state(0.0, 1.0));
        FAIL("expected DegenerateConstraintError");
    } catch (const DegenerateConstraintError& e) {
        CHECK(e.norm() < kDegenerateRowNorm);
    }
}

TEST_CASE("nominal constraint for first and second order barriers")
{
    const std::vector<double> p1{3.0};
    const auto c1 = hocbf_constraint(integrator(), Field::coordinate(1, 0), coefficients_from_poles(p1),
                                     StateVector::Constant(1, 2.0));
    CHECK(c1.row[0] == 1.0);
    CHECK(c1.offset == doctest::Approx(-3.0 * 2.0));

    const std::vector<double> p2{1.0, 1.0};
    const auto x = state(0.7, -1.3);
    const auto c2 = hocbf_constraint(testing::double_integrator(), Field::coordinate(2, 0),
                                     coefficients_from_poles(p2), x);
    CHECK(c2.row[0] == 1.0);
    CHECK(c2.offset == doctest::Approx(-(2.0 * x[1] + x[0])));
}

TEST_CASE("optimal gains")
{
    const std::vector<double> eta2{1.0, 1.0}, eta1{1.0};
    const auto k = optimal_k(eta2, 5.0);
    CHECK(k[0] == doctest::Approx(0.1));
    CHECK(k[1] == doctest::Approx(0.1));
    CHECK(optimal_k(eta1, 0.5)[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(optimal_k(eta2, 0.0), ValidationError);
    CHECK_THROWS_AS(optimal_k(std::vector<double>{-1.0}, 1.0), ValidationError);

    auto rho = [](double eta, double D, double k) { return eta * eta / (4 * k) + k * D * D; };
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double eta = u(rng), D = u(rng);
        const double ks = optimal_k(std::vector<double>{eta}, D)[0];
        for (double a : {0.2, 0.5, 2.0, 10.0, 20.0}) CHECK(rho(eta, D, ks) <= rho(eta, D, a * ks));
        // Grid search around k*.
        const double step = ks * 1e-3;
        double best = ks, best_rho = rho(eta, D, ks);
        for (int i = -900; i <= 900; ++i) {
            const double kk = ks + i * step;
            if (rho(eta, D, kk) < best_rho) best_rho = rho(eta, D, kk), best = kk;
        }
        CHECK(std::abs(best - ks) <= step);
    }
}

TEST_CASE("disturbance gains of the ACC chain are exactly one")
{
    const auto samples = acc_sample_states(kAcc, 100, 6);
    const auto eta = estimate_eta(acc_system(kAcc), acc_barrier(kAcc), 2, kCase1Bound, samples);
    REQUIRE(eta.size() == 2);
    CHECK(eta[0] == 1.0);
    CHECK(eta[1] == 1.0);
}

TEST_CASE("Young gap is nonnegative and closes only at the optimal gain")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.05, 5.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const Eigen::Vector3d v(u(rng), u(rng), u(rng));
        const double D = pos(rng), k = pos(rng), n = v.norm();
        const double lhs = v.squaredNorm() / (4 * k) + k * D * D;
        CHECK(lhs >= D * n * (1 - 1e-15));
        const double ks = n / (2 * D);
        const double at_opt = v.squaredNorm() / (4 * ks) + ks * D * D;
        CHECK(std::abs(at_opt - D * n) <= 1e-12 * std::max(1.0, D * n));
    }
}

TEST_CASE("chain membership")
{
    const auto chain = acc_chain(kAcc, kCase1Bound);
    CHECK(chain_membership(chain, state(100.0, 13.89)).in_set);
    CHECK_FALSE(chain_membership(chain, state(9.0, 13.89)).in_set);

    // phi~_1 is affine in v_f with slope -1: place the state on its zero level.
    const double D = 12.0;
    double v = chain.phi(1).value(state(D, 0.0));
    while (chain.phi(1).value(state(D, v)) < 0.0) v = std::nextafter(v, -1e9);
    const auto m = chain_membership(chain, state(D, v));
    CHECK(std::abs(m.values[1]) <= 1e-12);
    CHECK(m.in_set);
}
