#pragma once

#include <stdexcept>
#include <string>

namespace bikeshare {

/// Coarse classification used by the CLI to pick an exit status.
enum class ErrorKind {
    Config,     // bad input values or files
    Domain,     // the model left the region where it is defined
    Internal,   // a broken invariant inside this library
};

class BikeshareError : public std::runtime_error {
public:
    BikeshareError(ErrorKind kind, std::string name, const std::string& what)
        : std::runtime_error(what), kind_(kind), name_(std::move(name)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

private:
    ErrorKind kind_;
    std::string name_;
};

#define BIKESHARE_DEFINE_ERROR(Type, Kind)                                   \
    class Type : public BikeshareError {                                     \
    public:                                                                  \
        explicit Type(const std::string& what)                               \
            : BikeshareError(ErrorKind::Kind, #Type, what) {}                \
    }

BIKESHARE_DEFINE_ERROR(ConfigError, Config);
BIKESHARE_DEFINE_ERROR(FullSystemError, Domain);
BIKESHARE_DEFINE_ERROR(NegativeFleetError, Domain);
BIKESHARE_DEFINE_ERROR(StepInstabilityError, Domain);
BIKESHARE_DEFINE_ERROR(DegenerateCaseError, Domain);
BIKESHARE_DEFINE_ERROR(NoBracketError, Domain);
BIKESHARE_DEFINE_ERROR(AssumptionViolationError, Domain);
BIKESHARE_DEFINE_ERROR(EmptyMeasurementError, Domain);
BIKESHARE_DEFINE_ERROR(EmptyFeasibleSetError, Domain);
BIKESHARE_DEFINE_ERROR(InvariantViolation, Internal);

#undef BIKESHARE_DEFINE_ERROR

/// A trajectory left the region where y0 and yK are at most 1 - delta.
class DomainExitError : public BikeshareError {
public:
    DomainExitError(double exit_time, const std::string& what)
        : BikeshareError(ErrorKind::Domain, "DomainExitError", what), exit_time_(exit_time) {}

    double exit_time() const noexcept { return exit_time_; }

private:
    double exit_time_;
};

}  // namespace bikeshare
