#include <doctest.h>

#include <cmath>

#include "drcbf/errors.hpp"
#include "support.hpp"

using namespace drcbf;
using drcbf::testing::state;

namespace {

const AccParameters kAcc;

}  // namespace

TEST_CASE("dynamics at the initial state")
{
    const auto sys = acc_system(kAcc);
    const auto x0 = kAcc.initial_state();
    CHECK(x0 == state(100.0, 13.89));
    const Eigen::VectorXd rate = sys->rate(x0, Eigen::VectorXd::Zero(1), Eigen::Vector2d::Zero());
    CHECK(rate[0] == doctest::Approx(6.11).epsilon(1e-14));
    CHECK(kAcc.drag(13.89) == doctest::Approx(117.783025).epsilon(1e-14));
    CHECK(rate[1] == doctest::Approx(-0.07138).epsilon(1e-4));

    const Eigen::VectorXd cancel = sys->rate(x0, Eigen::VectorXd::Constant(1, kAcc.drag(13.89)), Eigen::Vector2d::Zero());
    CHECK(std::abs(cancel[1]) <= 1e-16);

    const Eigen::VectorXd disturbed = sys->rate(x0, Eigen::VectorXd::Zero(1), Eigen::Vector2d(0.5, -0.25));
    CHECK(disturbed[0] == doctest::Approx(6.61));
    CHECK(disturbed[1] == doctest::Approx(rate[1] - 0.25));
}

TEST_CASE("declared relative degrees hold over the operating region")
{
    std::vector<StateVector> samples;
    for (int i = 0; i < 100; ++i) samples.push_back(state(10.0 + 1.9 * i, 0.4 * i));
    const auto report = verify_relative_degree(acc_system(kAcc), acc_barrier(kAcc), samples);
    CHECK(report.ird_ok);
    CHECK(report.drd_ok);
}

TEST_CASE("barrier")
{
    const auto b = acc_barrier(kAcc);
    CHECK(b.value(state(100.0, 3.0)) == 90.0);
    CHECK(b.value(state(10.0, 3.0)) == 0.0);
    CHECK(b.gradient(state(42.0, 7.0)) == Eigen::RowVector2d(1.0, 0.0));
    CHECK(testing::gradient_error(b, acc_sample_states(kAcc, 20, 1)) <= 1e-9);
}

TEST_CASE("closed-form cascade values")
{
    const auto x0 = state(100.0, 13.89);
    const auto d = closed_form_drcbf_terms(kAcc, x0, 5.0);
    CHECK(d.w1 == doctest::Approx(3.61).epsilon(1e-13));
    CHECK(d.w2 == doctest::Approx(-2.42861).epsilon(1e-5));
    AccParameters stiff;
    stiff.k = {1e15, 0.1};
    CHECK(closed_form_drcbf_terms(stiff, x0, 5.0).w1 == doctest::Approx(20.0 - 13.89).epsilon(1e-12));

    const auto a = closed_form_adrcbf_terms(kAcc, x0);
    CHECK(a.gamma0 == doctest::Approx(0.011111).epsilon(1e-5));
    CHECK(std::isfinite(a.offset));
    CHECK_THROWS_AS(closed_form_adrcbf_terms(kAcc, state(10.0, 5.0)), BoundaryProximityError);
}

TEST_CASE("disturbance gain of every level is one")
{
    const auto chain = std::get<2>(case_config(1, "drcbf").controller.barrier);
    const auto sys = chain->system();
    for (const auto& x : acc_sample_states(kAcc, 100, 9)) {
        CHECK(lie_h(chain->tilde_b(0), *sys, x).norm() == 1.0);
        CHECK(lie_h(chain->tilde_b(1), *sys, x).norm() == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("chain fields have exact gradients")
{
    const auto states = acc_sample_states(kAcc, 100, 10);
    const auto d = std::get<2>(case_config(1, "drcbf").controller.barrier);
    const auto a = std::get<3>(case_config(1, "adrcbf").controller.barrier);
    const auto h = std::get<1>(case_config(1, "hocbf").controller.barrier);
    std::vector<Field> fields{d->tilde_b(0), d->tilde_b(1), d->w(1), d->w(2), d->phi(1), h->theta(1), acc_clf(kAcc)};
    for (int i = 0; i < 2; ++i) fields.insert(fields.end(), {a->psi(i), a->phi(i), a->gamma(i)});
    fields.push_back(a->pi(1));
    fields.push_back(a->pi(2));
    std::vector<StateVector> interior;
    for (const auto& x : states) {
        if (interior_membership(*a, x).min_margin > 1e-3) interior.push_back(x);
    }
    REQUIRE(interior.size() > 50);
    for (const auto& f : fields) CHECK_MESSAGE(testing::gradient_error(f, interior) <= 1e-6, f.name());
}

TEST_CASE("case configurations")
{
    const auto c1 = case_scenario(1, "drcbf");
    CHECK(c1.resolved_bound() == doctest::Approx(6.7268).epsilon(1e-5));
    CHECK(resolved_gains(c1) == std::vector<double>{0.1, 0.1});
    const auto& du = c1.disturbance.channels[0];
    REQUIRE(du.size() == 2);
    CHECK(std::get<UniformNoiseTerm>(du[0]).low == -4.0);
    CHECK(std::get<UniformNoiseTerm>(du[0]).high == 4.0);
    CHECK(std::get<SinusoidTerm>(du[1]).angular_frequency == 5.0);

    const auto c3 = case_scenario(3, "drcbf");
    const double ks = 1.0 / (2.0 * std::sqrt(162.0));
    const auto k = resolved_gains(c3);
    CHECK(k[0] == doctest::Approx(ks).epsilon(1e-14));
    CHECK(k[1] == doctest::Approx(ks).epsilon(1e-14));
    auto scaled = c3;
    scaled.k_multiplier = 20.0;
    CHECK(resolved_gains(scaled)[0] == doctest::Approx(20.0 * ks).epsilon(1e-14));
    // Estimated eta reproduces the stated eta = (1, 1).
    auto estimated = c3;
    estimated.eta.clear();
    CHECK(resolved_gains(estimated)[0] == doctest::Approx(ks).epsilon(1e-14));

    const auto d2 = realize(case_scenario(2, "adrcbf").disturbance, 1.0).evaluate(0.0);
    CHECK(d2 == Eigen::Vector2d(1.5, 2.0));

    CHECK_THROWS_AS(case_scenario(4, "drcbf"), ValidationError);
    CHECK_THROWS_AS(case_scenario(1, "mpc"), ValidationError);
}

TEST_CASE("parameter validation")
{
    AccParameters p;
    p.mass = -1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = AccParameters{};
    p.initial_distance = 10.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = AccParameters{};
    p.poles = {5.0};
    CHECK_THROWS_AS(p.validate(), DimensionError);
}
