#include "drcbf/controller.hpp"

#include <cmath>
#include <limits>

#include "drcbf/errors.hpp"

namespace drcbf {

const char* to_string(BarrierMode mode)
{
    switch (mode) {
    case BarrierMode::none: return "none";
    case BarrierMode::hocbf: return "hocbf";
    case BarrierMode::drcbf: return "drcbf";
    case BarrierMode::adrcbf: return "adrcbf";
    }
    return "?";
}

AffineControlConstraint clf_constraint(const ClfSpec& clf, const ControlAffineSystem& system, const StateVector& x)
{
    AffineControlConstraint c;
    c.row = lie_g(clf.V, system, x);
    c.slack_coefficient = -1.0;
    c.offset = -clf.sigma * clf.V.value(x) - lie_f(clf.V, system, x);
    c.sense = Sense::less_equal;
    return c;
}

AffineControlConstraint barrier_constraint(const ControllerSpec& spec, const StateVector& x, GuardMonitor* monitor)
{
    switch (spec.mode()) {
    case BarrierMode::hocbf: return std::get<1>(spec.barrier)->constraint(x);
    case BarrierMode::drcbf: return drcbf_constraint(*std::get<2>(spec.barrier), x);
    case BarrierMode::adrcbf: return adrcbf_constraint(*std::get<3>(spec.barrier), x, monitor);
    case BarrierMode::none: break;
    }
    throw ValidationError("controller has no barrier chain");
}

std::vector<double> barrier_levels(const ControllerSpec& spec, const StateVector& x)
{
    std::vector<double> out;
    switch (spec.mode()) {
    case BarrierMode::hocbf: {
        const auto& chain = *std::get<1>(spec.barrier);
        for (int i = 0; i < chain.order(); ++i) out.push_back(chain.theta(i).value(x));
        break;
    }
    case BarrierMode::drcbf: out = chain_membership(*std::get<2>(spec.barrier), x).values; break;
    case BarrierMode::adrcbf: out = interior_membership(*std::get<3>(spec.barrier), x).values; break;
    case BarrierMode::none: break;
    }
    return out;
}

namespace {

// Rows normalized to <= in z = (u, delta).
void append_row(const AffineControlConstraint& c, int p, Eigen::MatrixXd& A, Eigen::VectorXd& b)
{
    const auto r = A.rows();
    A.conservativeResize(r + 1, p + 1);
    b.conservativeResize(r + 1);
    const double sign = c.sense == Sense::less_equal ? 1.0 : -1.0;
    A.block(r, 0, 1, p) = sign * c.row;
    A(r, p) = sign * c.slack_coefficient;
    b[r] = sign * c.offset;
}

ControlStep solve_step(const ControllerSpec& spec, const StateVector& x, bool with_barrier)
{
    const auto& system = *spec.system;
    const int p = system.input_dim();
    ControlStep step;
    step.clf = clf_constraint(spec.clf, system, x);

    QpProblem qp;
    qp.Q = Eigen::MatrixXd::Zero(p + 1, p + 1);
    qp.Q.topLeftCorner(p, p) = 2.0 * spec.cost.H(x);
    qp.Q(p, p) = 2.0 * spec.clf.slack_weight;
    qp.c = Eigen::VectorXd::Zero(p + 1);
    qp.c.head(p) = spec.cost.F(x).transpose();
    qp.A.resize(0, p + 1);
    qp.b.resize(0);
    append_row(step.clf, p, qp.A, qp.b);

    GuardMonitor monitor;
    const bool barrier = with_barrier && spec.mode() != BarrierMode::none;
    if (barrier) {
        step.cbf = barrier_constraint(spec, x, &monitor);
        append_row(step.cbf, p, qp.A, qp.b);
    }
    step.guard_events = monitor.events;

    const QpSolution sol = solve_qp(qp);
    step.status = sol.status;
    step.u = sol.z.head(p);
    step.slack = sol.z[p];
    step.clf_residual = step.clf.residual(step.u, step.slack);
    step.cbf_residual = barrier ? step.cbf.residual(step.u) : std::numeric_limits<double>::quiet_NaN();
    return step;
}

}  // namespace

ControlStep control_step(const ControllerSpec& spec, const StateVector& x, double /*t*/)
{
    if (!spec.system) throw ValidationError("controller has no system");
    if (!(spec.clf.sigma > 0.0) || !(spec.clf.slack_weight > 0.0)) {
        throw ValidationError("CLF sigma and slack weight must be positive");
    }
    return solve_step(spec, x, true);
}

ControlStep unconstrained_clf_step(const ControllerSpec& spec, const StateVector& x)
{
    return solve_step(spec, x, false);
}

}  // namespace drcbf
