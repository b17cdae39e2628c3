#include "drcbf/adrcbf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drcbf/drcbf.hpp"
#include "drcbf/errors.hpp"

namespace drcbf {

double BarrierEnergy::operator()(double phi) const
{
    return apply(Jet(JetLayout::get(1, 0), phi)).value();
}

double BarrierEnergy::derivative(double phi) const
{
    return apply(Jet::variable(JetLayout::get(1, 1), phi, 0)).partial(0);
}

BarrierEnergy BarrierEnergy::reciprocal(double guard)
{
    return BarrierEnergy{"1/phi", [](const Jet& a) { return drcbf::reciprocal(a); }, guard};
}

namespace {

class EnergyNode final : public Field::Node {
public:
    EnergyNode(Field phi, BarrierEnergy energy, double gain, int level)
        : Node(phi.dimension(), Field::Provenance::algebraic_composite, "Gamma_" + std::to_string(level)),
          phi_(std::move(phi)), energy_(std::move(energy)), gain_(gain), level_(level)
    {
    }

    Jet expand(const StateVector& x, int order, GuardMonitor* monitor) const override
    {
        Jet arg = phi_.expand(x, order, monitor);
        const double v = arg.value();
        if (!(v > energy_.guard)) {
            if (!monitor) {
                std::ostringstream msg;
                msg << "phi~_" << level_ << " = " << v << " is not above the energy guard " << energy_.guard;
                throw BoundaryProximityError(msg.str(), level_, v);
            }
            ++monitor->events;
            monitor->closest = std::min(monitor->closest, v);
            // Shift in two steps so a large negative v cannot swallow the guard.
            arg -= v;
            arg += energy_.guard;
        }
        Jet out = energy_.apply(arg);
        out *= gain_;
        return out;
    }

private:
    Field phi_;
    BarrierEnergy energy_;
    double gain_;
    int level_;
};

void require_positive(std::span<const double> values, const char* symbol)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(std::isfinite(values[i]) && values[i] > 0.0)) {
            throw ValidationError(std::string("gain ") + symbol + "_" + std::to_string(i) +
                                  " must be strictly positive");
        }
    }
}

}  // namespace

AdrcbfChain build_adrcbf_chain(const SystemPtr& system, const Field& b, const CoefficientTable& coeffs,
                               std::span<const double> k, std::span<const double> r, BarrierEnergy energy,
                               std::span<const StateVector> samples)
{
    const int m = system->input_relative_degree();
    if (coeffs.order() != m) throw DimensionError("coefficient table order", m, coeffs.order());
    if (static_cast<int>(k.size()) != m) throw DimensionError("gains k", m, k.size());
    if (static_cast<int>(r.size()) != m) throw DimensionError("gains r", m, r.size());
    require_positive(k, "k");
    require_positive(r, "r");
    if (!energy.apply) throw ValidationError("barrier energy has no evaluator");
    if (!(energy.guard > 0.0)) throw ValidationError("barrier energy guard must be positive");
    if (b.dimension() != system->state_dim()) throw DimensionError("barrier", system->state_dim(), b.dimension());
    if (samples.empty()) throw ValidationError("adaptive chain needs at least one sample state");

    const auto report = verify_relative_degree(system, b, samples);
    if (!report.ird_ok) {
        throw ValidationError("barrier does not have input relative degree " +
                              std::to_string(system->input_relative_degree()));
    }

    AdrcbfChain chain;
    chain.system_ = system;
    chain.coeffs_ = coeffs;
    chain.k_.assign(k.begin(), k.end());
    chain.r_.assign(r.begin(), r.end());
    chain.energy_ = energy;

    chain.psi_.push_back(b);
    chain.phi_.push_back(b);
    chain.gamma_.push_back(Field(std::make_shared<EnergyNode>(b, energy, r[0], 0)));
    for (int i = 1; i <= m; ++i) {
        const Field& prev = chain.psi_.back();
        chain.pi_.push_back(lie_derivative(prev, system, Channel::drift) -
                            (1.0 / (4.0 * k[i - 1])) * lie_squared_norm(prev, system, Channel::disturbance));
        if (i == m) break;
        chain.psi_.push_back(chain.pi_.back() - k[i - 1] * chain.gamma_[i - 1]);
        Field phi = chain.psi_.back();
        for (int j = 0; j < i; ++j) phi = phi + coeffs.coefficient(i, j) * chain.psi_[j];
        chain.phi_.push_back(phi);
        chain.gamma_.push_back(Field(std::make_shared<EnergyNode>(phi, energy, r[i], i)));
    }
    for (int j = 0; j < system->input_dim(); ++j) {
        chain.beta_.push_back(lie_derivative(chain.psi_.back(), system, Channel::input, j));
    }

    // Gamma_i for i <= m-2 sits inside psi~_{m-1}; it must not reach the input.
    for (int i = 0; i + 2 <= m; ++i) {
        for (int j = 0; j < system->input_dim(); ++j) {
            const Field reach = lie_derivative(chain.gamma_[i], system, Channel::input, j);
            for (const auto& x : samples) {
                const double v = reach.value(x);
                if (std::abs(v) > kRelativeDegreeTolerance * (1.0 + std::abs(chain.gamma_[i].value(x)))) {
                    throw ValidationError("Gamma_" + std::to_string(i) + " contributes to the input row");
                }
            }
        }
    }
    return chain;
}

Eigen::RowVectorXd AdrcbfChain::beta_u(const StateVector& x, GuardMonitor* monitor) const
{
    Eigen::RowVectorXd out(beta_.size());
    for (std::size_t j = 0; j < beta_.size(); ++j) out[static_cast<Eigen::Index>(j)] = beta_[j].value(x, monitor);
    return out;
}

AffineControlConstraint adrcbf_constraint(const AdrcbfChain& chain, const StateVector& x, GuardMonitor* monitor)
{
    const int m = chain.order();
    const double guard = chain.energy().guard;
    if (!monitor) {
        for (int i = 0; i < m; ++i) {
            const double v = chain.phi(i).value(x);
            if (!(v > guard)) {
                throw BoundaryProximityError("state is not strictly inside the adaptive safe set: phi~_" +
                                                 std::to_string(i) + " = " + std::to_string(v),
                                             i, v);
            }
        }
    }

    AffineControlConstraint c;
    c.row = chain.beta_u(x, monitor);
    if (!(c.row.norm() >= kDegenerateRowNorm)) {
        throw DegenerateConstraintError("adaptive barrier constraint has no control authority", c.row.norm());
    }
    double offset = chain.gains()[m - 1] * chain.gamma(m - 1).value(x, monitor) - chain.pi(m).value(x, monitor);
    for (int j = 0; j < m; ++j) offset -= chain.coefficients().coefficient(m, j) * chain.psi(j).value(x, monitor);
    c.offset = offset;
    c.sense = Sense::greater_equal;
    return c;
}

InteriorMembership interior_membership(const AdrcbfChain& chain, const StateVector& x)
{
    InteriorMembership out;
    out.in_open_set = true;
    out.min_margin = std::numeric_limits<double>::infinity();
    GuardMonitor clamp;
    for (int i = 0; i < chain.order(); ++i) {
        const double v = chain.phi(i).value(x, &clamp);
        out.values.push_back(v);
        out.min_margin = std::min(out.min_margin, v);
        if (!(v > 0.0)) out.in_open_set = false;
    }
    return out;
}

}  // namespace drcbf
