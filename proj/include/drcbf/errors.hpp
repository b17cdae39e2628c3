#pragma once

#include <stdexcept>
#include <string>

namespace drcbf {

/// Operand sizes disagree; `operand()` names the offender.
class DimensionError : public std::invalid_argument {
public:
    DimensionError(std::string operand, std::size_t expected, std::size_t actual)
        : std::invalid_argument(operand + ": expected dimension " + std::to_string(expected) + ", got " +
                                std::to_string(actual)),
          operand_(std::move(operand))
    {
    }
    const std::string& operand() const { return operand_; }

private:
    std::string operand_;
};

/// A guarded reciprocal (or barrier energy) was evaluated too close to zero.
class GuardError : public std::domain_error {
public:
    GuardError(const std::string& what, double operand) : std::domain_error(what), operand_(operand) {}
    double operand() const { return operand_; }

private:
    double operand_;
};

/// Interior precondition of the adaptive chain violated at the requested state.
class BoundaryProximityError : public GuardError {
public:
    BoundaryProximityError(const std::string& what, int level, double value) : GuardError(what, value), level_(level)
    {
    }
    int level() const { return level_; }

private:
    int level_;
};

/// The control-facing row of a barrier constraint vanished (IRD lost at x).
class DegenerateConstraintError : public std::runtime_error {
public:
    DegenerateConstraintError(const std::string& what, double norm) : std::runtime_error(what), norm_(norm) {}
    double norm() const { return norm_; }

private:
    double norm_;
};

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IntegrationFault : public std::runtime_error {
public:
    IntegrationFault(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
    double time() const { return time_; }

private:
    double time_;
};

}  // namespace drcbf
