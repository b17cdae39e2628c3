#pragma once

#include <span>
#include <vector>

#include "drcbf/constraint.hpp"
#include "drcbf/field.hpp"
#include "drcbf/poles.hpp"

namespace drcbf {

inline constexpr double kDegenerateRowNorm = 1e-12;

/// Disturbance-rejection barrier cascade built from a known disturbance bound.
///
/// b~_0 = b, w~_i = L_f b~_{i-1} - ||L_h b~_{i-1}||^2 / (4 k_i),
/// b~_i = w~_i - k_i D^2 for i < m, and phi~_i = b~_i + sum_{j<i} c_j^i b~_j.
/// None of the stored fields depend on the disturbance realization.
class DrcbfChain {
public:
    const SystemPtr& system() const { return system_; }
    const Field& barrier() const { return tilde_b_.front(); }
    int order() const { return coeffs_.order(); }
    const CoefficientTable& coefficients() const { return coeffs_; }
    std::span<const double> gains() const { return k_; }
    double disturbance_bound() const { return bound_; }

    /// b~_i, i in 0..m-1.
    const Field& tilde_b(int i) const { return tilde_b_.at(i); }
    /// w~_i, i in 1..m.
    const Field& w(int i) const { return w_.at(i - 1); }
    /// phi~_i, i in 0..m-1.
    const Field& phi(int i) const { return phi_.at(i); }

    /// beta_u = L_g b~_{m-1}.
    Eigen::RowVectorXd beta_u(const StateVector& x) const;
    /// b~_i evaluated along the closed loop; for i = m this includes beta_u u.
    double tilde_b_value(int i, const StateVector& x, const Eigen::VectorXd& u) const;

private:
    friend DrcbfChain build_drcbf_chain(const SystemPtr&, const Field&, const CoefficientTable&,
                                        std::span<const double>, double, std::span<const StateVector>);
    DrcbfChain() = default;

    SystemPtr system_;
    CoefficientTable coeffs_;
    std::vector<double> k_;
    double bound_ = 0.0;
    std::vector<Field> tilde_b_;
    std::vector<Field> w_;
    std::vector<Field> beta_;
    std::vector<Field> phi_;
};

/// Builds the cascade after checking gains, bound and the declared input
/// relative degree of b over `samples` (which must be non-empty and safe).
DrcbfChain build_drcbf_chain(const SystemPtr& system, const Field& b, const CoefficientTable& coeffs,
                             std::span<const double> k, double disturbance_bound,
                             std::span<const StateVector> samples);

/// beta_u u >= k_m D^2 - w~_m - sum_{j<m} c_j^m b~_j.
AffineControlConstraint drcbf_constraint(const DrcbfChain& chain, const StateVector& x);

struct ChainMembership {
    bool in_set = false;
    std::vector<double> values;
};

ChainMembership chain_membership(const DrcbfChain& chain, const StateVector& x);

/// Nominal high-order CBF with linear class-K terms:
/// theta_0 = b, theta_i = L_f theta_{i-1} + p_i theta_{i-1}. Ignores h.
class HocbfChain {
public:
    HocbfChain(SystemPtr system, const Field& b, CoefficientTable coeffs);

    const SystemPtr& system() const { return system_; }
    int order() const { return coeffs_.order(); }
    const Field& theta(int i) const { return theta_.at(i); }
    const CoefficientTable& coefficients() const { return coeffs_; }

    /// L_g theta_{m-1} u >= -L_f theta_{m-1} - p_m theta_{m-1}.
    AffineControlConstraint constraint(const StateVector& x) const;

private:
    SystemPtr system_;
    CoefficientTable coeffs_;
    std::vector<Field> theta_;
    Field top_drift_;
    std::vector<Field> top_input_;
};

AffineControlConstraint hocbf_constraint(const SystemPtr& system, const Field& b, const CoefficientTable& coeffs,
                                         const StateVector& x);

/// k*_i = eta_i / (2 D), the minimizer of eta^2/(4k) + k D^2.
std::vector<double> optimal_k(std::span<const double> eta, double disturbance_bound);

/// eta_i = max over samples of ||L_h b~_{i-1}||, with b~ built level by level
/// from the gains already chosen (k_i = eta_i / (2 D)).
std::vector<double> estimate_eta(const SystemPtr& system, const Field& b, int order, double disturbance_bound,
                                 std::span<const StateVector> samples);

}  // namespace drcbf
