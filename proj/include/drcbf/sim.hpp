#pragma once

#include <string>
#include <utility>
#include <vector>

#include "drcbf/controller.hpp"
#include "drcbf/disturbance.hpp"

namespace drcbf {

struct SimulationConfig {
    ControllerSpec controller;
    SignalSpec disturbance;
    StateVector x0;
    double horizon = 30.0;
    double control_period = 1e-3;
    int substeps = 1;
    /// Free-form run parameters copied into the log.
    std::vector<std::pair<std::string, std::string>> metadata;
};

struct StepRecord {
    double t = 0.0;
    StateVector x;
    Eigen::VectorXd u;
    double slack = 0.0;
    Eigen::VectorXd d;
    std::vector<double> levels;  // phi~_0..phi~_{m-1} (theta_i for the nominal chain)
    double cbf_residual = 0.0;
    double clf_residual = 0.0;
    QpStatus status = QpStatus::optimal;
    std::size_t guard_events = 0;
};

enum class RunStatus { completed, qp_failure, integration_fault };

const char* to_string(RunStatus status);

struct TrajectoryLog {
    std::vector<StepRecord> steps;
    StateVector final_state;
    RunStatus status = RunStatus::completed;
    std::string failure;
    std::size_t guard_events = 0;
    std::vector<std::pair<std::string, std::string>> metadata;
};

/// One classical RK4 step of xdot = f + g u + h d with u and d held.
StateVector integrate_step(const ControlAffineSystem& system, const StateVector& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& d, double h);

/// Zero-order-hold closed loop. Rejects an initial state outside the barrier
/// set; stops early (status set, partial log kept) on a QP or integration fault.
TrajectoryLog run_simulation(const SimulationConfig& config);

}  // namespace drcbf
