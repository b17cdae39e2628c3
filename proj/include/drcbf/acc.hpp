#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "drcbf/controller.hpp"
#include "drcbf/disturbance.hpp"
#include "drcbf/sim.hpp"

namespace drcbf {

/// Adaptive cruise control: state (D, v_f), follower thrust u, disturbances
/// (d_u, d_m) on the distance and speed rows.
struct AccParameters {
    double mass = 1650.0;
    double lead_speed = 20.0;
    double f0 = 0.1;
    double f1 = 5.0;
    double f2 = 0.25;
    double min_distance = 10.0;
    double desired_speed = 35.0;
    double sigma = 10.0;
    double slack_weight = 2.0;
    std::vector<double> poles{5.0, 10.0};
    std::vector<double> k{0.1, 0.1};
    std::vector<double> r{1.0, 1.0};
    double initial_distance = 100.0;
    double initial_speed = 13.89;
    /// When false the disturbance columns are identically zero.
    bool disturbance_channels = true;

    double drag(double v) const { return f0 + f1 * v + f2 * v * v; }
    StateVector initial_state() const;
    /// Throws ValidationError on nonpositive physical constants or D(0) <= D_min.
    void validate() const;
};

/// Dvdot = v_l - v_f + d_u, v_f dot = (u - F_r(v_f)) / M + d_m.
SystemPtr acc_system(const AccParameters& params);
/// b = D - D_min.
Field acc_barrier(const AccParameters& params);
/// V = (v_f - v_d)^2.
Field acc_clf(const AccParameters& params);
/// H = 2/M^2, F = -2 F_r / M^2.
QuadraticCost acc_cost(const AccParameters& params);

/// Uniform states in D in [D_min + 0.5, 200], v_f in [0, 40].
std::vector<StateVector> acc_sample_states(const AccParameters& params, std::size_t count, std::uint64_t seed);

struct AccDrcbfTerms {
    double w1 = 0.0;
    double w2 = 0.0;
    double tilde_b1 = 0.0;
    double row = 0.0;     // coefficient of u
    double offset = 0.0;  // row * u >= offset
};

/// Hand-derived cascade for the ACC model, written directly in (D, v_f).
AccDrcbfTerms closed_form_drcbf_terms(const AccParameters& params, const StateVector& x, double disturbance_bound);

struct AccAdrcbfTerms {
    double pi1 = 0.0;
    double gamma0 = 0.0;
    double psi1 = 0.0;
    double phi1 = 0.0;
    double gamma1 = 0.0;
    double pi2 = 0.0;
    double row = 0.0;
    double offset = 0.0;
};

/// Hand-derived adaptive cascade; throws BoundaryProximityError when b or
/// phi~_1 is not strictly positive.
AccAdrcbfTerms closed_form_adrcbf_terms(const AccParameters& params, const StateVector& x);

/// Everything needed to assemble one closed-loop ACC run.
struct AccScenario {
    AccParameters params;
    BarrierMode controller = BarrierMode::drcbf;
    /// Replace params.k by k_multiplier * eta / (2 D).
    bool optimal_k = false;
    double k_multiplier = 1.0;
    /// Empty: estimate from sample states.
    std::vector<double> eta;
    /// Unset: nominal_bound of the disturbance spec.
    std::optional<double> disturbance_bound;
    SignalSpec disturbance;
    double horizon = 30.0;
    double control_period = 1e-3;
    int substeps = 1;

    double resolved_bound() const;
};

/// The gains actually used by the barrier chain.
std::vector<double> resolved_gains(const AccScenario& scenario);

SimulationConfig build_simulation(const AccScenario& scenario);

/// The three benchmark cases. Variant is "hocbf", "drcbf", "adrcbf" or
/// "none"; case 3 additionally sets optimal gains (multiplier 1) for both
/// robust variants. Throws ValidationError on an unknown id or variant.
AccScenario case_scenario(int case_id, const std::string& variant);
SimulationConfig case_config(int case_id, const std::string& variant);

/// Disturbance specs for each case.
SignalSpec case_disturbance(int case_id, double hold_interval = 1e-3, std::uint64_t seed = 1);

BarrierMode parse_barrier_mode(const std::string& name);

}  // namespace drcbf
