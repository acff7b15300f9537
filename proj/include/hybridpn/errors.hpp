#pragma once

#include <stdexcept>
#include <string>

namespace hybridpn {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Caller violated a documented precondition (e.g. quadrature too coarse).
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

// Data not resolved by the requested representation.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration file or run specification.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hybridpn
