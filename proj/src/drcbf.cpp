#include "drcbf/drcbf.hpp"

#include <cmath>
#include <sstream>

#include "drcbf/errors.hpp"

namespace drcbf {

namespace {

void require_ird(const SystemPtr& system, const Field& b, std::span<const StateVector> samples)
{
    if (samples.empty()) throw ValidationError("relative-degree verification needs at least one sample state");
    const auto report = verify_relative_degree(system, b, samples);
    if (!report.ird_ok) {
        std::ostringstream msg;
        msg << "barrier does not have input relative degree " << system->input_relative_degree();
        if (!report.witnesses.empty()) {
            const auto& w = report.witnesses.front();
            msg << " (" << w.condition << ", norm " << w.norm << ")";
        }
        throw ValidationError(msg.str());
    }
}

// One level of the Young-inequality recursion without the constant shift:
// L_f F - ||L_h F||^2 / (4k).
Field young_step(const Field& f, const SystemPtr& system, double k)
{
    return lie_derivative(f, system, Channel::drift) -
           (1.0 / (4.0 * k)) * lie_squared_norm(f, system, Channel::disturbance);
}

std::vector<Field> input_row(const Field& f, const SystemPtr& system)
{
    std::vector<Field> row;
    for (int j = 0; j < system->input_dim(); ++j) row.push_back(lie_derivative(f, system, Channel::input, j));
    return row;
}

Eigen::RowVectorXd evaluate_row(const std::vector<Field>& row, const StateVector& x, GuardMonitor* monitor = nullptr)
{
    Eigen::RowVectorXd out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[static_cast<Eigen::Index>(j)] = row[j].value(x, monitor);
    return out;
}

void require_degenerate_free(const Eigen::RowVectorXd& row, const StateVector& x)
{
    const double norm = row.norm();
    if (!(norm >= kDegenerateRowNorm)) {
        std::ostringstream msg;
        msg << "barrier constraint has no control authority at x = (" << x.transpose() << "), |beta_u| = " << norm;
        throw DegenerateConstraintError(msg.str(), norm);
    }
}

}  // namespace

DrcbfChain build_drcbf_chain(const SystemPtr& system, const Field& b, const CoefficientTable& coeffs,
                             std::span<const double> k, double disturbance_bound,
                             std::span<const StateVector> samples)
{
    const int m = system->input_relative_degree();
    if (coeffs.order() != m) throw DimensionError("coefficient table order", m, coeffs.order());
    if (static_cast<int>(k.size()) != m) throw DimensionError("gains k", m, k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!(std::isfinite(k[i]) && k[i] > 0.0)) {
            throw ValidationError("gain k_" + std::to_string(i + 1) + " must be strictly positive");
        }
    }
    if (!(std::isfinite(disturbance_bound) && disturbance_bound >= 0.0)) {
        throw ValidationError("disturbance bound must be finite and nonnegative");
    }
    if (b.dimension() != system->state_dim()) throw DimensionError("barrier", system->state_dim(), b.dimension());
    require_ird(system, b, samples);

    DrcbfChain chain;
    chain.system_ = system;
    chain.coeffs_ = coeffs;
    chain.k_.assign(k.begin(), k.end());
    chain.bound_ = disturbance_bound;
    const double d2 = disturbance_bound * disturbance_bound;

    chain.tilde_b_.push_back(b);
    for (int i = 1; i <= m; ++i) {
        chain.w_.push_back(young_step(chain.tilde_b_.back(), system, k[i - 1]));
        if (i < m) chain.tilde_b_.push_back(chain.w_.back() + (-k[i - 1] * d2));
    }
    chain.beta_ = input_row(chain.tilde_b_.back(), system);

    chain.phi_.push_back(b);
    for (int i = 1; i < m; ++i) {
        Field phi = chain.tilde_b_[i];
        for (int j = 0; j < i; ++j) phi = phi + coeffs.coefficient(i, j) * chain.tilde_b_[j];
        chain.phi_.push_back(phi);
    }
    return chain;
}

Eigen::RowVectorXd DrcbfChain::beta_u(const StateVector& x) const { return evaluate_row(beta_, x); }

double DrcbfChain::tilde_b_value(int i, const StateVector& x, const Eigen::VectorXd& u) const
{
    const int m = order();
    if (i < 0 || i > m) throw std::out_of_range("b~ level out of range");
    if (i < m) return tilde_b_[i].value(x);
    return w_.back().value(x) - k_.back() * bound_ * bound_ + beta_u(x).dot(u);
}

AffineControlConstraint drcbf_constraint(const DrcbfChain& chain, const StateVector& x)
{
    const int m = chain.order();
    AffineControlConstraint c;
    c.row = chain.beta_u(x);
    require_degenerate_free(c.row, x);
    double offset = chain.gains()[m - 1] * chain.disturbance_bound() * chain.disturbance_bound() - chain.w(m).value(x);
    for (int j = 0; j < m; ++j) offset -= chain.coefficients().coefficient(m, j) * chain.tilde_b(j).value(x);
    c.offset = offset;
    c.sense = Sense::greater_equal;
    return c;
}

ChainMembership chain_membership(const DrcbfChain& chain, const StateVector& x)
{
    ChainMembership out;
    out.in_set = true;
    for (int i = 0; i < chain.order(); ++i) {
        const double v = chain.phi(i).value(x);
        out.values.push_back(v);
        if (!(v >= 0.0)) out.in_set = false;
    }
    return out;
}

HocbfChain::HocbfChain(SystemPtr system, const Field& b, CoefficientTable coeffs)
    : system_(std::move(system)), coeffs_(std::move(coeffs))
{
    const int m = system_->input_relative_degree();
    if (coeffs_.order() != m) throw DimensionError("coefficient table order", m, coeffs_.order());
    const auto poles = coeffs_.poles();
    theta_.push_back(b);
    for (int i = 1; i < m; ++i) {
        const Field& prev = theta_.back();
        theta_.push_back(lie_derivative(prev, system_, Channel::drift) + poles[i - 1] * prev);
    }
    top_drift_ = lie_derivative(theta_.back(), system_, Channel::drift);
    top_input_ = input_row(theta_.back(), system_);
}

AffineControlConstraint HocbfChain::constraint(const StateVector& x) const
{
    AffineControlConstraint c;
    c.row = evaluate_row(top_input_, x);
    require_degenerate_free(c.row, x);
    c.offset = -top_drift_.value(x) - coeffs_.poles().back() * theta_.back().value(x);
    c.sense = Sense::greater_equal;
    return c;
}

AffineControlConstraint hocbf_constraint(const SystemPtr& system, const Field& b, const CoefficientTable& coeffs,
                                         const StateVector& x)
{
    return HocbfChain(system, b, coeffs).constraint(x);
}

std::vector<double> optimal_k(std::span<const double> eta, double disturbance_bound)
{
    if (!(std::isfinite(disturbance_bound) && disturbance_bound > 0.0)) {
        throw ValidationError("optimal gains need a strictly positive disturbance bound");
    }
    std::vector<double> k;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        if (!(std::isfinite(eta[i]) && eta[i] > 0.0)) {
            throw ValidationError("eta_" + std::to_string(i + 1) + " must be strictly positive");
        }
        k.push_back(eta[i] / (2.0 * disturbance_bound));
    }
    return k;
}

std::vector<double> estimate_eta(const SystemPtr& system, const Field& b, int order, double disturbance_bound,
                                 std::span<const StateVector> samples)
{
    if (samples.empty()) throw ValidationError("eta estimation needs at least one sample state");
    std::vector<double> eta;
    Field level = b;
    for (int i = 1; i <= order; ++i) {
        double largest = 0.0;
        for (const auto& x : samples) largest = std::max(largest, lie_h(level, *system, x).norm());
        eta.push_back(largest);
        if (i < order) {
            const double k = optimal_k(std::span<const double>(&largest, 1), disturbance_bound).front();
            level = young_step(level, system, k) + (-k * disturbance_bound * disturbance_bound);
        }
    }
    return eta;
}

}  // namespace drcbf
