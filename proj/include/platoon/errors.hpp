#pragma once

#include <stdexcept>
#include <string>

namespace platoon {

/// Non-finite input or a value outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Precondition on an argument violated (dt <= 0, d <= 0, |delta| >= pi/2, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A timestamp went backwards.
class OrderingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An event was scheduled before the current physics time.
class CausalityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A CAM field carries its "unavailable" sentinel.
class UnavailableFieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Platoon filter invoked for a vehicle without a predecessor.
class NoPredecessorError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A metric whose denominator vanished.
class UndefinedMetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario configuration rejected by validation. `field` is the dotted path
/// of the offending entry, when known.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::string field = {})
        : std::runtime_error(what), field_(std::move(field))
    {
    }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Wraps any failure raised while stepping, tagged with the step index.
class StepError : public std::runtime_error {
public:
    StepError(long long step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step)
    {
    }
    long long step() const noexcept { return step_; }

private:
    long long step_;
};

} // namespace platoon
