#include "drcbf/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drcbf/errors.hpp"

namespace drcbf {

namespace {

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t interval_index(double t, double hold)
{
    // Grid times k*hold belong to interval k despite rounding in k*hold/hold.
    return static_cast<std::size_t>(std::floor(t / hold + 1e-9));
}

void require_finite(double v, const std::string& what)
{
    if (!std::isfinite(v)) throw ValidationError(what + " must be finite");
}

template <typename Draw>
std::vector<std::vector<std::vector<double>>> draw_noise(const SignalSpec& spec, double horizon, Draw&& draw)
{
    std::vector<std::vector<std::vector<double>>> noise(spec.channels.size());
    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
        noise[c].resize(spec.channels[c].size());
        for (std::size_t k = 0; k < spec.channels[c].size(); ++k) {
            const auto* term = std::get_if<UniformNoiseTerm>(&spec.channels[c][k]);
            if (!term) continue;
            const auto count = static_cast<std::size_t>(std::ceil(horizon / term->hold_interval - 1e-9)) + 1;
            auto& seq = noise[c][k];
            seq.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                seq.push_back(term->low + (term->high - term->low) * draw(c, k, i));
            }
        }
    }
    return noise;
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t channel, std::uint64_t term, std::uint64_t index)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ channel);
    h = splitmix64(h ^ (term + 0x51ed2701ULL));
    h = splitmix64(h ^ index);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void validate(const SignalSpec& spec)
{
    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
        for (std::size_t k = 0; k < spec.channels[c].size(); ++k) {
            const std::string where = "channel " + std::to_string(c) + " term " + std::to_string(k);
            std::visit(overloaded{
                           [&](const ConstantTerm& t) { require_finite(t.value, where + " value"); },
                           [&](const SinusoidTerm& t) {
                               require_finite(t.amplitude, where + " amplitude");
                               require_finite(t.angular_frequency, where + " angular_frequency");
                               require_finite(t.phase, where + " phase");
                           },
                           [&](const UniformNoiseTerm& t) {
                               require_finite(t.low, where + " low");
                               require_finite(t.high, where + " high");
                               if (!(t.hold_interval > 0.0) || !std::isfinite(t.hold_interval)) {
                                   throw ValidationError(where + ": hold_interval must be positive");
                               }
                               if (t.low > t.high) throw ValidationError(where + ": low exceeds high");
                           },
                       },
                       spec.channels[c][k]);
        }
    }
}

SignalRealization realize(const SignalSpec& spec, double horizon)
{
    validate(spec);
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("realization horizon must be positive");
    SignalRealization out;
    out.spec_ = spec;
    out.horizon_ = horizon;
    out.noise_ = draw_noise(spec, horizon, [&](std::size_t c, std::size_t k, std::size_t i) {
        return counter_uniform(spec.seed, c, k, i);
    });
    return out;
}

SignalRealization realize_with_fixed_draw(const SignalSpec& spec, double horizon, double unit_draw)
{
    validate(spec);
    if (!(horizon > 0.0)) throw ValidationError("realization horizon must be positive");
    if (!(unit_draw >= 0.0 && unit_draw <= 1.0)) throw ValidationError("fixed draw must lie in [0, 1]");
    SignalRealization out;
    out.spec_ = spec;
    out.horizon_ = horizon;
    out.noise_ = draw_noise(spec, horizon, [&](std::size_t, std::size_t, std::size_t) { return unit_draw; });
    return out;
}

Eigen::VectorXd SignalRealization::evaluate(double t) const
{
    if (!(t >= 0.0 && t <= horizon_ * (1.0 + 1e-12))) {
        throw std::out_of_range("disturbance evaluated at t = " + std::to_string(t) + " outside [0, " +
                                std::to_string(horizon_) + "]");
    }
    Eigen::VectorXd d = Eigen::VectorXd::Zero(channels());
    for (std::size_t c = 0; c < spec_.channels.size(); ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < spec_.channels[c].size(); ++k) {
            acc += std::visit(overloaded{
                                  [](const ConstantTerm& term) { return term.value; },
                                  [t](const SinusoidTerm& term) {
                                      const double arg = term.angular_frequency * t + term.phase;
                                      return term.amplitude *
                                             (term.kind == SinusoidTerm::Kind::sin ? std::sin(arg) : std::cos(arg));
                                  },
                                  [&](const UniformNoiseTerm& term) {
                                      const auto& seq = noise_[c][k];
                                      const auto idx = std::min(interval_index(t, term.hold_interval), seq.size() - 1);
                                      return seq[idx];
                                  },
                              },
                              spec_.channels[c][k]);
        }
        d[static_cast<Eigen::Index>(c)] = acc;
    }
    return d;
}

Eigen::VectorXd evaluate(const SignalRealization& realization, double t) { return realization.evaluate(t); }

std::vector<double> channel_bounds(const SignalSpec& spec)
{
    validate(spec);
    std::vector<double> bounds;
    for (const auto& channel : spec.channels) {
        double bound = 0.0;
        for (const auto& term : channel) {
            bound += std::visit(overloaded{
                                    [](const ConstantTerm& t) { return std::abs(t.value); },
                                    [](const SinusoidTerm& t) { return std::abs(t.amplitude); },
                                    [](const UniformNoiseTerm& t) { return std::max(std::abs(t.low), std::abs(t.high)); },
                                },
                                term);
        }
        bounds.push_back(bound);
    }
    return bounds;
}

double nominal_bound(const SignalSpec& spec)
{
    double acc = 0.0;
    for (double b : channel_bounds(spec)) acc += b * b;
    return std::sqrt(acc);
}

}  // namespace drcbf
