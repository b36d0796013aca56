#pragma once

#include <stdexcept>
#include <string>

namespace uqkd {

// Precondition violations on caller-supplied parameters.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation that cannot produce a trustworthy answer (tolerance not met,
// maximum not bracketed, undefined ratio).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace uqkd
