#pragma once

#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "drcbf/adrcbf.hpp"
#include "drcbf/constraint.hpp"
#include "drcbf/drcbf.hpp"
#include "drcbf/field.hpp"
#include "drcbf/qp.hpp"

namespace drcbf {

struct ClfSpec {
    Field V;
    double sigma = 1.0;
    double slack_weight = 1.0;  // rho
};

/// J(u) = u'Hu + Fu, both possibly state dependent.
struct QuadraticCost {
    std::function<Eigen::MatrixXd(const StateVector&)> H;
    std::function<Eigen::RowVectorXd(const StateVector&)> F;
};

enum class BarrierMode { none, hocbf, drcbf, adrcbf };

const char* to_string(BarrierMode mode);

using BarrierChain = std::variant<std::monostate, std::shared_ptr<const HocbfChain>,
                                  std::shared_ptr<const DrcbfChain>, std::shared_ptr<const AdrcbfChain>>;

struct ControllerSpec {
    SystemPtr system;
    BarrierChain barrier;
    ClfSpec clf;
    QuadraticCost cost;

    BarrierMode mode() const { return static_cast<BarrierMode>(barrier.index()); }
};

/// L_gV u - delta <= -sigma V - L_fV, over (u, delta).
AffineControlConstraint clf_constraint(const ClfSpec& clf, const ControlAffineSystem& system, const StateVector& x);

/// Barrier row for the active mode. Adaptive mode clamps at the guard when a
/// monitor is supplied.
AffineControlConstraint barrier_constraint(const ControllerSpec& spec, const StateVector& x,
                                           GuardMonitor* monitor = nullptr);

/// phi~_i (or theta_i for the nominal chain, b alone without a barrier).
std::vector<double> barrier_levels(const ControllerSpec& spec, const StateVector& x);

struct ControlStep {
    Eigen::VectorXd u;
    double slack = 0.0;
    QpStatus status = QpStatus::infeasible;
    double clf_residual = 0.0;
    double cbf_residual = 0.0;  // NaN without a barrier row
    std::size_t guard_events = 0;
    AffineControlConstraint clf;
    AffineControlConstraint cbf;
};

/// Solves min J(u) + rho delta^2 subject to the slacked CLF row and the hard
/// barrier row. Pure: repeated calls with equal inputs give equal outputs.
ControlStep control_step(const ControllerSpec& spec, const StateVector& x, double t);

/// The same QP without the barrier row (used to audit slack usage).
ControlStep unconstrained_clf_step(const ControllerSpec& spec, const StateVector& x);

}  // namespace drcbf
