#include "drcbf/acc.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "drcbf/errors.hpp"

namespace drcbf {

namespace {

constexpr std::uint64_t kChainSampleSeed = 7;
constexpr std::size_t kChainSampleCount = 100;

void require_positive(double v, const char* what)
{
    if (!(std::isfinite(v) && v > 0.0)) throw ValidationError(std::string(what) + " must be strictly positive");
}

void require_positive(const std::vector<double>& v, const char* what, std::size_t size)
{
    if (v.size() != size) throw DimensionError(what, size, v.size());
    for (double e : v) require_positive(e, what);
}

std::string format_number(double v)
{
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

std::string format_list(const std::vector<double>& v)
{
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
    return out + "]";
}

}  // namespace

StateVector AccParameters::initial_state() const
{
    StateVector x(2);
    x << initial_distance, initial_speed;
    return x;
}

void AccParameters::validate() const
{
    require_positive(mass, "mass");
    require_positive(lead_speed, "lead_speed");
    require_positive(f0, "f0");
    require_positive(f1, "f1");
    require_positive(f2, "f2");
    require_positive(min_distance, "min_distance");
    require_positive(desired_speed, "desired_speed");
    require_positive(sigma, "sigma");
    require_positive(slack_weight, "slack_weight");
    require_positive(poles, "poles", 2);
    require_positive(k, "k", 2);
    require_positive(r, "r", 2);
    if (!std::isfinite(initial_speed)) throw ValidationError("initial speed must be finite");
    if (!(std::isfinite(initial_distance) && initial_distance > min_distance)) {
        throw ValidationError("initial distance must exceed min_distance");
    }
}

SystemPtr acc_system(const AccParameters& p)
{
    p.validate();
    const double M = p.mass, vl = p.lead_speed, f0 = p.f0, f1 = p.f1, f2 = p.f2;
    const bool channels = p.disturbance_channels;
    auto f = [=](std::span<const Jet> x) {
        const Jet& v = x[1];
        return std::vector<Jet>{vl - v, -(f0 + f1 * v + f2 * square(v)) / M};
    };
    auto g = [=](std::span<const Jet> x) {
        return std::vector<Jet>{Jet(x[0].layout(), 0.0), Jet(x[0].layout(), 1.0 / M)};
    };
    auto h = [=](std::span<const Jet> x) {
        const double on = channels ? 1.0 : 0.0;
        const auto& layout = x[0].layout();
        return std::vector<Jet>{Jet(layout, on), Jet(layout, 0.0), Jet(layout, 0.0), Jet(layout, on)};
    };
    return std::make_shared<const ControlAffineSystem>(2, 1, 2, f, g, h, 2, 1);
}

Field acc_barrier(const AccParameters& p)
{
    const double d_min = p.min_distance;
    return Field::from_expression(2, [d_min](std::span<const Jet> x) { return x[0] - d_min; }, "D - D_min");
}

Field acc_clf(const AccParameters& p)
{
    const double vd = p.desired_speed;
    return Field::from_expression(2, [vd](std::span<const Jet> x) { return square(x[1] - vd); }, "(v_f - v_d)^2");
}

QuadraticCost acc_cost(const AccParameters& p)
{
    const double M = p.mass;
    QuadraticCost cost;
    cost.H = [M](const StateVector&) { return Eigen::MatrixXd::Constant(1, 1, 2.0 / (M * M)); };
    cost.F = [M, p](const StateVector& x) {
        return Eigen::RowVectorXd::Constant(1, -2.0 * p.drag(x[1]) / (M * M));
    };
    return cost;
}

std::vector<StateVector> acc_sample_states(const AccParameters& p, std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> distance(p.min_distance + 0.5, 200.0);
    std::uniform_real_distribution<double> speed(0.0, 40.0);
    std::vector<StateVector> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        StateVector x(2);
        x[0] = distance(rng);
        x[1] = speed(rng);
        out.push_back(x);
    }
    return out;
}

AccDrcbfTerms closed_form_drcbf_terms(const AccParameters& p, const StateVector& x, double D)
{
    const auto c = coefficients_from_poles(p.poles);
    const double k1 = p.k[0], k2 = p.k[1], M = p.mass;
    const double b = x[0] - p.min_distance;
    const double v = x[1];
    AccDrcbfTerms t;
    t.w1 = p.lead_speed - v - 1.0 / (4.0 * k1);
    t.tilde_b1 = t.w1 - k1 * D * D;
    t.w2 = p.drag(v) / M - 1.0 / (4.0 * k2);
    t.row = -1.0 / M;
    t.offset = k2 * D * D - t.w2 - c.coefficient(2, 0) * b - c.coefficient(2, 1) * t.tilde_b1;
    return t;
}

AccAdrcbfTerms closed_form_adrcbf_terms(const AccParameters& p, const StateVector& x)
{
    const auto c = coefficients_from_poles(p.poles);
    const double k1 = p.k[0], k2 = p.k[1], r0 = p.r[0], r1 = p.r[1], M = p.mass;
    const double b = x[0] - p.min_distance;
    const double v = x[1];
    if (!(b > 0.0)) throw BoundaryProximityError("closed-form adaptive terms need b > 0", 0, b);
    AccAdrcbfTerms t;
    t.pi1 = p.lead_speed - v - 1.0 / (4.0 * k1);
    t.gamma0 = r0 / b;
    t.psi1 = t.pi1 - k1 * t.gamma0;
    t.phi1 = c.coefficient(1, 0) * b + c.coefficient(1, 1) * t.psi1;
    if (!(t.phi1 > 0.0)) throw BoundaryProximityError("closed-form adaptive terms need phi_1 > 0", 1, t.phi1);
    t.gamma1 = r1 / t.phi1;
    t.pi2 = p.drag(v) / M - 1.0 / (4.0 * k2) + k1 * r0 * (p.lead_speed - v) / (b * b) -
            k1 * k1 * r0 * r0 / (4.0 * k2 * b * b * b * b);
    t.row = -1.0 / M;
    t.offset = k2 * t.gamma1 - t.pi2 - c.coefficient(2, 0) * b - c.coefficient(2, 1) * t.psi1;
    return t;
}

double AccScenario::resolved_bound() const
{
    const double D = disturbance_bound ? *disturbance_bound : nominal_bound(disturbance);
    if (!(std::isfinite(D) && D >= 0.0)) throw ValidationError("disturbance bound must be finite and nonnegative");
    return D;
}

std::vector<double> resolved_gains(const AccScenario& s)
{
    if (!s.optimal_k) return s.params.k;
    require_positive(s.k_multiplier, "k_multiplier");
    std::vector<double> eta = s.eta;
    const double D = s.resolved_bound();
    if (eta.empty()) {
        const auto samples = acc_sample_states(s.params, kChainSampleCount, kChainSampleSeed);
        eta = estimate_eta(acc_system(s.params), acc_barrier(s.params), 2, D, samples);
    }
    if (eta.size() != 2) throw DimensionError("eta", 2, eta.size());
    auto k = optimal_k(eta, D);
    for (double& e : k) e *= s.k_multiplier;
    return k;
}

SimulationConfig build_simulation(const AccScenario& s)
{
    AccParameters params = s.params;
    params.validate();
    if (s.disturbance.channels.size() != 2) throw DimensionError("disturbance channels", 2, s.disturbance.channels.size());
    params.k = resolved_gains(s);

    const auto system = acc_system(params);
    const auto b = acc_barrier(params);
    const auto coeffs = coefficients_from_poles(params.poles);
    const auto samples = acc_sample_states(params, kChainSampleCount, kChainSampleSeed);

    SimulationConfig config;
    config.controller.system = system;
    config.controller.clf = ClfSpec{acc_clf(params), params.sigma, params.slack_weight};
    config.controller.cost = acc_cost(params);
    switch (s.controller) {
    case BarrierMode::none: break;
    case BarrierMode::hocbf: config.controller.barrier = std::make_shared<const HocbfChain>(system, b, coeffs); break;
    case BarrierMode::drcbf:
        config.controller.barrier = std::make_shared<const DrcbfChain>(
            build_drcbf_chain(system, b, coeffs, params.k, s.resolved_bound(), samples));
        break;
    case BarrierMode::adrcbf:
        config.controller.barrier = std::make_shared<const AdrcbfChain>(
            build_adrcbf_chain(system, b, coeffs, params.k, params.r, BarrierEnergy::reciprocal(), samples));
        break;
    }
    config.disturbance = s.disturbance;
    config.x0 = params.initial_state();
    config.horizon = s.horizon;
    config.control_period = s.control_period;
    config.substeps = s.substeps;

    auto& meta = config.metadata;
    meta.emplace_back("k", format_list(params.k));
    meta.emplace_back("r", format_list(params.r));
    meta.emplace_back("poles", format_list(params.poles));
    if (s.controller == BarrierMode::drcbf) meta.emplace_back("disturbance_bound", format_number(s.resolved_bound()));
    meta.emplace_back("disturbance_channels", params.disturbance_channels ? "true" : "false");
    double hold = 0.0;
    for (const auto& channel : s.disturbance.channels) {
        for (const auto& term : channel) {
            if (const auto* n = std::get_if<UniformNoiseTerm>(&term)) hold = n->hold_interval;
        }
    }
    if (hold > 0.0) meta.emplace_back("noise_hold", format_number(hold));
    return config;
}

BarrierMode parse_barrier_mode(const std::string& name)
{
    if (name == "none") return BarrierMode::none;
    if (name == "hocbf") return BarrierMode::hocbf;
    if (name == "drcbf") return BarrierMode::drcbf;
    if (name == "adrcbf") return BarrierMode::adrcbf;
    throw ValidationError("unknown controller '" + name + "' (expected none, hocbf, drcbf or adrcbf)");
}

SignalSpec case_disturbance(int case_id, double hold, std::uint64_t seed)
{
    using K = SinusoidTerm::Kind;
    SignalSpec spec;
    spec.seed = seed;
    switch (case_id) {
    case 1:
        spec.channels = {
            {UniformNoiseTerm{-4.0, 4.0, hold}, SinusoidTerm{1.0, 5.0, 0.0, K::sin}},
            {UniformNoiseTerm{-4.0, 4.0, hold}, SinusoidTerm{0.5, 10.0, 0.0, K::cos}},
        };
        break;
    case 2:
        spec.channels = {
            {SinusoidTerm{2.0, 5.0, 0.0, K::sin}, SinusoidTerm{1.5, 10.0, 0.0, K::cos}},
            {SinusoidTerm{1.0, 10.0, 0.0, K::sin}, SinusoidTerm{2.0, 6.0, 0.0, K::cos}},
        };
        break;
    case 3:
        spec.channels = {
            {UniformNoiseTerm{-4.0, 4.0, hold}, SinusoidTerm{5.0, 2.0, 0.0, K::sin}},
            {UniformNoiseTerm{-5.0, 5.0, hold}, SinusoidTerm{4.0, 2.0, 0.0, K::sin}},
        };
        break;
    default: throw ValidationError("unknown case id " + std::to_string(case_id) + " (expected 1, 2 or 3)");
    }
    return spec;
}

AccScenario case_scenario(int case_id, const std::string& variant)
{
    AccScenario s;
    s.disturbance = case_disturbance(case_id);
    s.controller = parse_barrier_mode(variant);
    if (case_id == 3 && (s.controller == BarrierMode::drcbf || s.controller == BarrierMode::adrcbf)) {
        s.optimal_k = true;
        s.eta = {1.0, 1.0};
    }
    return s;
}

SimulationConfig case_config(int case_id, const std::string& variant)
{
    return build_simulation(case_scenario(case_id, variant));
}

}  // namespace drcbf
