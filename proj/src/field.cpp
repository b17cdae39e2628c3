#include "drcbf/field.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "drcbf/errors.hpp"

namespace drcbf {

const char* to_string(Channel channel)
{
    switch (channel) {
    case Channel::drift: return "f";
    case Channel::input: return "g";
    case Channel::disturbance: return "h";
    }
    return "?";
}

ControlAffineSystem::ControlAffineSystem(int n, int p, int q, VectorMap f, MatrixMap g, MatrixMap h, int ird_m,
                                         int drd_r)
    : n_(n), p_(p), q_(q), f_(std::move(f)), g_(std::move(g)), h_(std::move(h)), ird_m_(ird_m), drd_r_(drd_r)
{
    if (n <= 0 || p <= 0 || q <= 0) throw ValidationError("system dimensions n, p, q must be positive");
    if (ird_m <= 0 || drd_r <= 0) throw ValidationError("relative degrees must be positive");
    if (!f_ || !g_ || !h_) throw ValidationError("system maps f, g, h must all be set");
}

int ControlAffineSystem::columns(Channel channel) const
{
    switch (channel) {
    case Channel::drift: return 1;
    case Channel::input: return p_;
    case Channel::disturbance: return q_;
    }
    return 0;
}

std::vector<std::vector<Jet>> ControlAffineSystem::channel_columns(Channel channel, std::span<const Jet> x) const
{
    if (static_cast<int>(x.size()) != n_) throw DimensionError("x", n_, x.size());
    std::vector<Jet> flat;
    switch (channel) {
    case Channel::drift: flat = f_(x); break;
    case Channel::input: flat = g_(x); break;
    case Channel::disturbance: flat = h_(x); break;
    }
    const int cols = columns(channel);
    const std::size_t expected = static_cast<std::size_t>(n_) * cols;
    if (flat.size() != expected) throw DimensionError(to_string(channel), expected, flat.size());

    std::vector<std::vector<Jet>> out(cols);
    for (int c = 0; c < cols; ++c) {
        out[c].assign(flat.begin() + static_cast<std::ptrdiff_t>(c) * n_,
                      flat.begin() + static_cast<std::ptrdiff_t>(c + 1) * n_);
    }
    return out;
}

std::vector<Jet> ControlAffineSystem::variables(const StateVector& x, int order) const
{
    if (x.size() != n_) throw DimensionError("x", n_, x.size());
    const auto layout = JetLayout::get(n_, order);
    std::vector<Jet> vars;
    vars.reserve(n_);
    for (int i = 0; i < n_; ++i) vars.push_back(Jet::variable(layout, x[i], i));
    return vars;
}

Eigen::MatrixXd ControlAffineSystem::evaluate_matrix(Channel channel, const StateVector& x) const
{
    const auto vars = variables(x, 0);
    const auto cols = channel_columns(channel, vars);
    Eigen::MatrixXd out(n_, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (int i = 0; i < n_; ++i) out(i, static_cast<Eigen::Index>(c)) = cols[c][i].value();
    }
    return out;
}

Eigen::VectorXd ControlAffineSystem::f(const StateVector& x) const { return evaluate_matrix(Channel::drift, x).col(0); }
Eigen::MatrixXd ControlAffineSystem::g(const StateVector& x) const { return evaluate_matrix(Channel::input, x); }
Eigen::MatrixXd ControlAffineSystem::h(const StateVector& x) const
{
    return evaluate_matrix(Channel::disturbance, x);
}

Eigen::VectorXd ControlAffineSystem::rate(const StateVector& x, const Eigen::VectorXd& u, const Eigen::VectorXd& d) const
{
    if (u.size() != p_) throw DimensionError("u", p_, u.size());
    if (d.size() != q_) throw DimensionError("d", q_, d.size());
    return f(x) + g(x) * u + h(x) * d;
}

namespace {

using Provenance = Field::Provenance;

// Display names nest with every derived level; keep them bounded.
std::string bounded(std::string name)
{
    constexpr std::size_t limit = 96;
    if (name.size() > limit) name = name.substr(0, limit - 3) + "...";
    return name;
}

class ExpressionNode final : public Field::Node {
public:
    ExpressionNode(int n, Field::Expression fn, std::string name)
        : Node(n, Provenance::user_supplied, std::move(name)), fn_(std::move(fn))
    {
    }
    Jet expand(const StateVector& x, int order, GuardMonitor*) const override
    {
        const auto layout = JetLayout::get(dimension, order);
        std::vector<Jet> vars;
        vars.reserve(dimension);
        for (int i = 0; i < dimension; ++i) vars.push_back(Jet::variable(layout, x[i], i));
        Jet out = fn_(vars);
        if (out.nvars() != dimension) throw DimensionError(name + " (expression output)", dimension, out.nvars());
        return out.truncated(order);
    }

private:
    Field::Expression fn_;
};

class SumNode final : public Field::Node {
public:
    SumNode(Field a, Field b, double sb)
        : Node(a.dimension(), Provenance::algebraic_composite,
               bounded("(" + a.name() + (sb < 0 ? " - " : " + ") + b.name() + ")")),
          a_(std::move(a)), b_(std::move(b)), sb_(sb)
    {
    }
    Jet expand(const StateVector& x, int order, GuardMonitor* m) const override
    {
        Jet out = a_.expand(x, order, m);
        Jet rhs = b_.expand(x, order, m);
        if (sb_ == 1.0) return out += rhs;
        return out -= rhs;
    }

private:
    Field a_, b_;
    double sb_;
};

class AffineNode final : public Field::Node {
public:
    AffineNode(Field a, double scale, double shift)
        : Node(a.dimension(), Provenance::algebraic_composite, a.name()), a_(std::move(a)), scale_(scale), shift_(shift)
    {
    }
    Jet expand(const StateVector& x, int order, GuardMonitor* m) const override
    {
        Jet out = a_.expand(x, order, m);
        out *= scale_;
        out += shift_;
        return out;
    }

private:
    Field a_;
    double scale_, shift_;
};

class ProductNode final : public Field::Node {
public:
    ProductNode(Field a, Field b)
        : Node(a.dimension(), Provenance::algebraic_composite, bounded(a.name() + "*" + b.name())), a_(std::move(a)),
          b_(std::move(b))
    {
    }
    Jet expand(const StateVector& x, int order, GuardMonitor* m) const override
    {
        return a_.expand(x, order, m) * b_.expand(x, order, m);
    }

private:
    Field a_, b_;
};

class ConstantNode final : public Field::Node {
public:
    ConstantNode(int n, double c) : Node(n, Provenance::user_supplied, std::to_string(c)), c_(c) {}
    Jet expand(const StateVector&, int order, GuardMonitor*) const override
    {
        return Jet(JetLayout::get(dimension, order), c_);
    }

private:
    double c_;
};

class LieNode final : public Field::Node {
public:
    LieNode(Field field, SystemPtr system, Channel channel, int column)
        : Node(field.dimension(), Provenance::derived_by_differentiation,
               bounded(std::string("L") + to_string(channel) +
                       (channel == Channel::drift ? "" : std::to_string(column)) + "(" + field.name() + ")")),
          field_(std::move(field)), system_(std::move(system)), channel_(channel), column_(column)
    {
    }
    Jet expand(const StateVector& x, int order, GuardMonitor* m) const override
    {
        const Jet expanded = field_.expand(x, order + 1, m);
        const auto cols = system_->channel_columns(channel_, system_->variables(x, order));
        const auto& column = cols[column_];
        Jet out(JetLayout::get(dimension, order), 0.0);
        for (int i = 0; i < dimension; ++i) out += expanded.derivative(i) * column[i];
        return out;
    }

private:
    Field field_;
    SystemPtr system_;
    Channel channel_;
    int column_;
};

class LieSquaredNormNode final : public Field::Node {
public:
    LieSquaredNormNode(Field field, SystemPtr system, Channel channel)
        : Node(field.dimension(), Provenance::derived_by_differentiation,
               bounded(std::string("|L") + to_string(channel) + "(" + field.name() + ")|^2")),
          field_(std::move(field)), system_(std::move(system)), channel_(channel)
    {
    }
    Jet expand(const StateVector& x, int order, GuardMonitor* m) const override
    {
        const Jet expanded = field_.expand(x, order + 1, m);
        std::vector<Jet> grad;
        grad.reserve(dimension);
        for (int i = 0; i < dimension; ++i) grad.push_back(expanded.derivative(i));
        const auto cols = system_->channel_columns(channel_, system_->variables(x, order));
        Jet out(JetLayout::get(dimension, order), 0.0);
        for (const auto& column : cols) {
            Jet entry(JetLayout::get(dimension, order), 0.0);
            for (int i = 0; i < dimension; ++i) entry += grad[i] * column[i];
            out += entry * entry;
        }
        return out;
    }

private:
    Field field_;
    SystemPtr system_;
    Channel channel_;
};

class ReciprocalNode final : public Field::Node {
public:
    ReciprocalNode(Field field, double guard)
        : Node(field.dimension(), Provenance::algebraic_composite, bounded("1/" + field.name())), field_(std::move(field)),
          guard_(guard)
    {
    }
    Jet expand(const StateVector& x, int order, GuardMonitor* m) const override
    {
        Jet a = field_.expand(x, order, m);
        const double v = a.value();
        if (std::abs(v) < guard_) {
            if (!m) {
                std::ostringstream msg;
                msg << "reciprocal guard breached: |" << field_.name() << "| = " << std::abs(v) << " < " << guard_;
                throw GuardError(msg.str(), v);
            }
            ++m->events;
            m->closest = std::min(m->closest, v);
            a -= v;
            a += std::copysign(guard_, v);
        }
        return reciprocal(a);
    }

private:
    Field field_;
    double guard_;
};

void require_same_space(const Field& a, const Field& b)
{
    if (!a.valid()) throw ValidationError("field operand is empty");
    if (!b.valid()) throw ValidationError("field operand is empty");
    if (a.dimension() != b.dimension()) throw DimensionError(b.name(), a.dimension(), b.dimension());
}

}  // namespace

Field Field::from_expression(int n, Expression expression, std::string name)
{
    if (n <= 0) throw ValidationError("field dimension must be positive");
    return Field(std::make_shared<ExpressionNode>(n, std::move(expression), std::move(name)));
}

Field Field::constant(int n, double c)
{
    return Field(std::make_shared<ConstantNode>(n, c));
}

Field Field::coordinate(int n, int index)
{
    if (index < 0 || index >= n) throw std::out_of_range("coordinate index out of range");
    return from_expression(n, [index](std::span<const Jet> x) { return x[index]; }, "x" + std::to_string(index));
}

int Field::dimension() const { return node_->dimension; }
Field::Provenance Field::provenance() const { return node_->provenance; }
const std::string& Field::name() const { return node_->name; }

void Field::check_state(const StateVector& x) const
{
    if (!node_) throw ValidationError("evaluating an empty field");
    if (x.size() != node_->dimension) throw DimensionError("x", node_->dimension, x.size());
}

Jet Field::expand(const StateVector& x, int order, GuardMonitor* monitor) const
{
    check_state(x);
    return node_->expand(x, order, monitor);
}

double Field::value(const StateVector& x, GuardMonitor* monitor) const { return expand(x, 0, monitor).value(); }

Eigen::RowVectorXd Field::gradient(const StateVector& x, GuardMonitor* monitor) const
{
    const Jet j = expand(x, 1, monitor);
    Eigen::RowVectorXd out(dimension());
    for (int i = 0; i < dimension(); ++i) out[i] = j.partial(i);
    return out;
}

Field operator+(const Field& a, const Field& b)
{
    require_same_space(a, b);
    return Field(std::make_shared<SumNode>(a, b, 1.0));
}

Field operator-(const Field& a, const Field& b)
{
    require_same_space(a, b);
    return Field(std::make_shared<SumNode>(a, b, -1.0));
}

Field operator*(const Field& a, const Field& b)
{
    require_same_space(a, b);
    return Field(std::make_shared<ProductNode>(a, b));
}

Field operator*(double s, const Field& a) { return Field(std::make_shared<AffineNode>(a, s, 0.0)); }
Field operator+(const Field& a, double c) { return Field(std::make_shared<AffineNode>(a, 1.0, c)); }
Field operator-(const Field& a) { return -1.0 * a; }

Field lie_derivative(const Field& field, const SystemPtr& system, Channel channel, int column)
{
    if (field.dimension() != system->state_dim()) {
        throw DimensionError("field", system->state_dim(), field.dimension());
    }
    if (column < 0 || column >= system->columns(channel)) {
        throw DimensionError(std::string("column of ") + to_string(channel), system->columns(channel), column);
    }
    return Field(std::make_shared<LieNode>(field, system, channel, column));
}

Field lie_squared_norm(const Field& field, const SystemPtr& system, Channel channel)
{
    if (field.dimension() != system->state_dim()) {
        throw DimensionError("field", system->state_dim(), field.dimension());
    }
    return Field(std::make_shared<LieSquaredNormNode>(field, system, channel));
}

Field reciprocal(const Field& field, double guard)
{
    if (!(guard > 0.0)) throw ValidationError("reciprocal guard must be positive");
    return Field(std::make_shared<ReciprocalNode>(field, guard));
}

namespace {

Eigen::RowVectorXd lie_row(const Field& field, const ControlAffineSystem& system, const StateVector& x,
                           Channel channel)
{
    if (field.dimension() != system.state_dim()) {
        throw DimensionError("field", system.state_dim(), field.dimension());
    }
    if (x.size() != system.state_dim()) throw DimensionError("x", system.state_dim(), x.size());
    const Eigen::RowVectorXd grad = field.gradient(x);
    const auto cols = system.channel_columns(channel, system.variables(x, 0));
    Eigen::RowVectorXd out(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        double acc = 0.0;
        for (int i = 0; i < system.state_dim(); ++i) acc += grad[i] * cols[c][i].value();
        out[static_cast<Eigen::Index>(c)] = acc;
    }
    return out;
}

}  // namespace

double lie_f(const Field& field, const ControlAffineSystem& system, const StateVector& x)
{
    return lie_row(field, system, x, Channel::drift)[0];
}

Eigen::RowVectorXd lie_g(const Field& field, const ControlAffineSystem& system, const StateVector& x)
{
    return lie_row(field, system, x, Channel::input);
}

Eigen::RowVectorXd lie_h(const Field& field, const ControlAffineSystem& system, const StateVector& x)
{
    return lie_row(field, system, x, Channel::disturbance);
}

RelativeDegreeReport verify_relative_degree(const SystemPtr& system, const Field& b,
                                            std::span<const StateVector> samples, double tol)
{
    const int m = system->input_relative_degree();
    const int r = system->disturbance_relative_degree();
    std::vector<Field> drift_powers{b};
    for (int k = 1; k < std::max(m, r); ++k) {
        drift_powers.push_back(lie_derivative(drift_powers.back(), system, Channel::drift));
    }

    RelativeDegreeReport report;
    auto check = [&](Channel channel, int degree, bool& ok, const StateVector& x) {
        if (!ok) return;
        for (int k = 0; k < degree; ++k) {
            const auto row = lie_row(drift_powers[k], *system, x, channel);
            const double norm = row.norm();
            const bool last = k == degree - 1;
            if ((!last && norm > tol) || (last && norm <= tol)) {
                std::ostringstream cond;
                cond << "L" << to_string(channel) << " Lf^" << k << " b " << (last ? "vanishes" : "nonzero");
                report.witnesses.push_back({cond.str(), x, k, norm});
                ok = false;
                return;
            }
        }
    };

    for (const auto& x : samples) {
        if (b.value(x) < 0.0) throw ValidationError("relative-degree sample lies outside the safe set");
        check(Channel::input, m, report.ird_ok, x);
        check(Channel::disturbance, r, report.drd_ok, x);
    }
    return report;
}

}  // namespace drcbf
