#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "drcbf/constraint.hpp"
#include "drcbf/field.hpp"
#include "drcbf/poles.hpp"

namespace drcbf {

/// Energy-like function B: (0, inf) -> [0, inf) that diverges at 0+.
struct BarrierEnergy {
    std::string name;
    /// B applied to a jet; must be exact through the jet's order.
    std::function<Jet(const Jet&)> apply;
    double guard = kReciprocalGuard;

    double operator()(double phi) const;
    double derivative(double phi) const;

    /// B(phi) = 1/phi.
    static BarrierEnergy reciprocal(double guard = kReciprocalGuard);
};

/// Adaptive cascade that needs no disturbance bound:
/// psi~_0 = b, pi~_i = L_f psi~_{i-1} - ||L_h psi~_{i-1}||^2 / (4 k_i),
/// psi~_i = pi~_i - k_i Gamma_{i-1}, phi~_i = psi~_i + sum_{j<i} c_j^i psi~_j,
/// Gamma_i = r_i B(phi~_i).
class AdrcbfChain {
public:
    const SystemPtr& system() const { return system_; }
    const Field& barrier() const { return psi_.front(); }
    int order() const { return coeffs_.order(); }
    const CoefficientTable& coefficients() const { return coeffs_; }
    std::span<const double> gains() const { return k_; }
    std::span<const double> rejection_gains() const { return r_; }
    const BarrierEnergy& energy() const { return energy_; }

    /// psi~_i, i in 0..m-1.
    const Field& psi(int i) const { return psi_.at(i); }
    /// pi~_i, i in 1..m.
    const Field& pi(int i) const { return pi_.at(i - 1); }
    /// phi~_i, i in 0..m-1.
    const Field& phi(int i) const { return phi_.at(i); }
    /// Gamma_i, i in 0..m-1.
    const Field& gamma(int i) const { return gamma_.at(i); }

    Eigen::RowVectorXd beta_u(const StateVector& x, GuardMonitor* monitor = nullptr) const;

private:
    friend AdrcbfChain build_adrcbf_chain(const SystemPtr&, const Field&, const CoefficientTable&,
                                          std::span<const double>, std::span<const double>, BarrierEnergy,
                                          std::span<const StateVector>);
    AdrcbfChain() = default;

    SystemPtr system_;
    CoefficientTable coeffs_;
    std::vector<double> k_;
    std::vector<double> r_;
    BarrierEnergy energy_;
    std::vector<Field> psi_;
    std::vector<Field> pi_;
    std::vector<Field> phi_;
    std::vector<Field> gamma_;
    std::vector<Field> beta_;
};

/// Builds the adaptive cascade. Samples are used for the relative-degree check
/// and to confirm that Gamma_i (i <= m-2) adds nothing to the input row; they
/// must lie strictly inside {b > guard}.
AdrcbfChain build_adrcbf_chain(const SystemPtr& system, const Field& b, const CoefficientTable& coeffs,
                               std::span<const double> k, std::span<const double> r, BarrierEnergy energy,
                               std::span<const StateVector> samples);

/// beta~_u u >= k_m Gamma_{m-1} - pi~_m - sum_{j<m} c_j^m psi~_j.
///
/// Without a monitor, any phi~_i <= guard raises BoundaryProximityError; with
/// one, the energy argument is clamped to the guard and the event is counted.
AffineControlConstraint adrcbf_constraint(const AdrcbfChain& chain, const StateVector& x,
                                          GuardMonitor* monitor = nullptr);

struct InteriorMembership {
    bool in_open_set = false;
    std::vector<double> values;
    double min_margin = 0.0;
};

/// phi~_i values (energy arguments clamped internally so the call never throws).
InteriorMembership interior_membership(const AdrcbfChain& chain, const StateVector& x);

}  // namespace drcbf
