#pragma once

#include <stdexcept>
#include <string>

namespace eqlab {

// Precondition violations are reported as std::invalid_argument.
// The types below cover the remaining failure kinds.

/// Malformed or truncated file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough samples/events for a statistic to be meaningful.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quantity whose definition breaks down on the given input
/// (all-zero state for an alignment, single-sign readouts for a ratio).
class UndefinedQuantity : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace eqlab
