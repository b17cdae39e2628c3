#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "drcbf/jet.hpp"

namespace drcbf {

using StateVector = Eigen::VectorXd;

inline constexpr double kReciprocalGuard = 1e-9;
inline constexpr double kRelativeDegreeTolerance = 1e-9;

/// Caller-owned record of guard activity. Passing one to an evaluation turns
/// guard breaches into clamps (counted here) instead of exceptions.
struct GuardMonitor {
    std::size_t events = 0;
    double closest = std::numeric_limits<double>::infinity();
};

/// The three vector-field channels of xdot = f(x) + g(x) u + h(x) d.
enum class Channel { drift, input, disturbance };

const char* to_string(Channel channel);

/// Disturbed control-affine dynamics. Maps are written over jets so that any
/// field built from them can be differentiated to arbitrary order.
class ControlAffineSystem {
public:
    using VectorMap = std::function<std::vector<Jet>(std::span<const Jet>)>;
    /// Column-major n x cols matrix.
    using MatrixMap = std::function<std::vector<Jet>(std::span<const Jet>)>;

    ControlAffineSystem(int n, int p, int q, VectorMap f, MatrixMap g, MatrixMap h, int ird_m, int drd_r);

    int state_dim() const { return n_; }
    int input_dim() const { return p_; }
    int disturbance_dim() const { return q_; }
    int input_relative_degree() const { return ird_m_; }
    int disturbance_relative_degree() const { return drd_r_; }
    int columns(Channel channel) const;

    /// Columns of the requested channel (a single column for the drift).
    std::vector<std::vector<Jet>> channel_columns(Channel channel, std::span<const Jet> x) const;

    Eigen::VectorXd f(const StateVector& x) const;
    Eigen::MatrixXd g(const StateVector& x) const;
    Eigen::MatrixXd h(const StateVector& x) const;
    /// f + g u + h d.
    Eigen::VectorXd rate(const StateVector& x, const Eigen::VectorXd& u, const Eigen::VectorXd& d) const;

    /// Independent variables for a jet expansion around x.
    std::vector<Jet> variables(const StateVector& x, int order) const;

private:
    Eigen::MatrixXd evaluate_matrix(Channel channel, const StateVector& x) const;

    int n_, p_, q_;
    VectorMap f_;
    MatrixMap g_;
    MatrixMap h_;
    int ird_m_, drd_r_;
};

using SystemPtr = std::shared_ptr<const ControlAffineSystem>;

/// Smooth scalar function of the state, evaluable as a truncated Taylor jet.
/// Fields are immutable handles; copies share the same expression graph.
class Field {
public:
    enum class Provenance { user_supplied, derived_by_differentiation, algebraic_composite };
    using Expression = std::function<Jet(std::span<const Jet>)>;

    class Node {
    public:
        Node(int dimension, Provenance provenance, std::string name)
            : dimension(dimension), provenance(provenance), name(std::move(name))
        {
        }
        virtual ~Node() = default;
        virtual Jet expand(const StateVector& x, int order, GuardMonitor* monitor) const = 0;

        int dimension;
        Provenance provenance;
        std::string name;
    };

    Field() = default;
    explicit Field(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static Field from_expression(int n, Expression expression, std::string name = "user");
    static Field constant(int n, double c);
    static Field coordinate(int n, int index);

    bool valid() const { return node_ != nullptr; }
    int dimension() const;
    Provenance provenance() const;
    const std::string& name() const;

    /// Taylor expansion around x, exact through `order`.
    Jet expand(const StateVector& x, int order, GuardMonitor* monitor = nullptr) const;
    double value(const StateVector& x, GuardMonitor* monitor = nullptr) const;
    Eigen::RowVectorXd gradient(const StateVector& x, GuardMonitor* monitor = nullptr) const;

private:
    void check_state(const StateVector& x) const;
    std::shared_ptr<const Node> node_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field operator+(const Field& a, double c);
Field operator-(const Field& a);

/// L_{column} F for the chosen channel, as a new jet-evaluable field.
Field lie_derivative(const Field& field, const SystemPtr& system, Channel channel, int column = 0);
/// ||L_channel F||^2 summed over the channel's columns.
Field lie_squared_norm(const Field& field, const SystemPtr& system, Channel channel);
/// 1/F; evaluation throws GuardError when |F| < guard (or clamps under a monitor).
Field reciprocal(const Field& field, double guard = kReciprocalGuard);

double lie_f(const Field& field, const ControlAffineSystem& system, const StateVector& x);
Eigen::RowVectorXd lie_g(const Field& field, const ControlAffineSystem& system, const StateVector& x);
Eigen::RowVectorXd lie_h(const Field& field, const ControlAffineSystem& system, const StateVector& x);

struct RelativeDegreeWitness {
    std::string condition;
    StateVector state;
    int lie_order;  // k in L_{g|h} L_f^k b
    double norm;
};

struct RelativeDegreeReport {
    bool ird_ok = true;
    bool drd_ok = true;
    std::vector<RelativeDegreeWitness> witnesses;  // first violation per condition
};

/// Sampling surrogate for the set-wide IRD/DRD definitions. Samples must lie
/// in {b >= 0}.
RelativeDegreeReport verify_relative_degree(const SystemPtr& system, const Field& b,
                                            std::span<const StateVector> samples,
                                            double tol = kRelativeDegreeTolerance);

}  // namespace drcbf
