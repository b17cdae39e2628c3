#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <variant>
#include <vector>

namespace drcbf {

struct ConstantTerm {
    double value = 0.0;
};

struct SinusoidTerm {
    enum class Kind { sin, cos };
    double amplitude = 0.0;
    double angular_frequency = 0.0;
    double phase = 0.0;
    Kind kind = Kind::sin;
};

/// Uniform draw on [low, high], held constant over each hold interval.
struct UniformNoiseTerm {
    double low = 0.0;
    double high = 1.0;
    double hold_interval = 1e-3;
};

using SignalTerm = std::variant<ConstantTerm, SinusoidTerm, UniformNoiseTerm>;

struct SignalSpec {
    std::vector<std::vector<SignalTerm>> channels;
    std::uint64_t seed = 0;
};

/// Throws ValidationError on a nonpositive hold interval, low > high, or
/// non-finite parameters.
void validate(const SignalSpec& spec);

/// A spec with its noise sequences drawn. Immutable.
class SignalRealization {
public:
    const SignalSpec& spec() const { return spec_; }
    double horizon() const { return horizon_; }
    int channels() const { return static_cast<int>(spec_.channels.size()); }
    /// Pre-drawn samples of noise term `term` on `channel` (empty for other terms).
    const std::vector<double>& noise(int channel, int term) const { return noise_.at(channel).at(term); }

    Eigen::VectorXd evaluate(double t) const;

private:
    friend SignalRealization realize(const SignalSpec&, double);
    friend SignalRealization realize_with_fixed_draw(const SignalSpec&, double, double);
    SignalSpec spec_;
    double horizon_ = 0.0;
    std::vector<std::vector<std::vector<double>>> noise_;
};

/// Draws ceil(horizon / hold) samples per noise term from a counter-based
/// generator keyed by (seed, channel, term, interval index).
SignalRealization realize(const SignalSpec& spec, double horizon);

/// Realization with every unit draw pinned to `unit_draw` in [0, 1].
SignalRealization realize_with_fixed_draw(const SignalSpec& spec, double horizon, double unit_draw);

/// Sum of the channel terms at t; t must lie in [0, horizon].
Eigen::VectorXd evaluate(const SignalRealization& realization, double t);

/// Per-channel triangle bound: sum|constants| + sum amplitudes + max(|low|, |high|).
std::vector<double> channel_bounds(const SignalSpec& spec);

/// Euclidean norm of channel_bounds; a conservative bound on ||d(t)||.
double nominal_bound(const SignalSpec& spec);

/// Uniform double in [0, 1) for the given key.
double counter_uniform(std::uint64_t seed, std::uint64_t channel, std::uint64_t term, std::uint64_t index);

}  // namespace drcbf
