#include "drcbf/sim.hpp"

#include <cmath>
#include <sstream>

#include "drcbf/errors.hpp"

namespace drcbf {

const char* to_string(RunStatus status)
{
    switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::qp_failure: return "qp_failure";
    case RunStatus::integration_fault: return "integration_fault";
    }
    return "?";
}

StateVector integrate_step(const ControlAffineSystem& system, const StateVector& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& d, double h)
{
    if (!(h > 0.0)) throw ValidationError("integration step must be positive");
    const Eigen::VectorXd k1 = system.rate(x, u, d);
    const Eigen::VectorXd k2 = system.rate(x + 0.5 * h * k1, u, d);
    const Eigen::VectorXd k3 = system.rate(x + 0.5 * h * k2, u, d);
    const Eigen::VectorXd k4 = system.rate(x + h * k3, u, d);
    StateVector next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite state after integration from x = (" << x.transpose() << ") with u = (" << u.transpose()
            << ")";
        throw IntegrationFault(msg.str(), 0.0);
    }
    return next;
}

namespace {

void require_initial_membership(const SimulationConfig& config)
{
    const auto& spec = config.controller;
    bool inside = true;
    switch (spec.mode()) {
    case BarrierMode::drcbf: inside = chain_membership(*std::get<2>(spec.barrier), config.x0).in_set; break;
    case BarrierMode::adrcbf: inside = interior_membership(*std::get<3>(spec.barrier), config.x0).in_open_set; break;
    case BarrierMode::hocbf:
        for (double v : barrier_levels(spec, config.x0)) inside = inside && v >= 0.0;
        break;
    case BarrierMode::none: break;
    }
    if (!inside) throw ValidationError("initial state lies outside the controller's barrier set");
}

std::string format_number(double v)
{
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace

TrajectoryLog run_simulation(const SimulationConfig& config)
{
    const auto& spec = config.controller;
    if (!spec.system) throw ValidationError("simulation has no system");
    const auto& system = *spec.system;
    if (config.x0.size() != system.state_dim()) throw DimensionError("x0", system.state_dim(), config.x0.size());
    if (!(config.horizon > 0.0)) throw ValidationError("horizon must be positive");
    if (!(config.control_period > 0.0)) throw ValidationError("control period must be positive");
    if (config.substeps < 1) throw ValidationError("integrator substeps must be at least 1");
    if (static_cast<int>(config.disturbance.channels.size()) != system.disturbance_dim()) {
        throw DimensionError("disturbance channels", system.disturbance_dim(), config.disturbance.channels.size());
    }
    require_initial_membership(config);

    const auto realization = realize(config.disturbance, config.horizon);
    const auto steps = static_cast<std::size_t>(std::llround(config.horizon / config.control_period));
    const double h = config.control_period / config.substeps;

    TrajectoryLog log;
    log.metadata = config.metadata;
    log.metadata.emplace_back("controller", to_string(spec.mode()));
    log.metadata.emplace_back("seed", std::to_string(config.disturbance.seed));
    log.metadata.emplace_back("horizon", format_number(config.horizon));
    log.metadata.emplace_back("control_period", format_number(config.control_period));
    log.metadata.emplace_back("integrator", "rk4");
    log.metadata.emplace_back("substeps", std::to_string(config.substeps));
    log.metadata.emplace_back("control_hold", "zero-order");
    log.steps.reserve(steps);

    StateVector x = config.x0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * config.control_period;
        StepRecord rec;
        rec.t = t;
        rec.x = x;
        rec.d = realization.evaluate(t);

        ControlStep step;
        try {
            step = control_step(spec, x, t);
        } catch (const std::exception& e) {
            log.status = RunStatus::qp_failure;
            log.failure = std::string("control step failed at t = ") + format_number(t) + ": " + e.what();
            break;
        }
        rec.u = step.u;
        rec.slack = step.slack;
        rec.status = step.status;
        rec.cbf_residual = step.cbf_residual;
        rec.clf_residual = step.clf_residual;
        rec.guard_events = step.guard_events;
        rec.levels = barrier_levels(spec, x);
        log.guard_events += step.guard_events;

        if (step.status != QpStatus::optimal) {
            log.steps.push_back(std::move(rec));
            log.status = RunStatus::qp_failure;
            log.failure = "QP infeasible at t = " + format_number(t);
            break;
        }

        try {
            for (int s = 0; s < config.substeps; ++s) x = integrate_step(system, x, step.u, rec.d, h);
        } catch (const IntegrationFault& e) {
            log.steps.push_back(std::move(rec));
            log.status = RunStatus::integration_fault;
            log.failure = std::string(e.what()) + " at t = " + format_number(t);
            break;
        }
        log.steps.push_back(std::move(rec));
    }
    log.final_state = x;
    log.metadata.emplace_back("guard_events", std::to_string(log.guard_events));
    return log;
}

}  // namespace drcbf
