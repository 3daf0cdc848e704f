#pragma once

#include <stdexcept>
#include <string>

namespace asuman {

// Caller passed something outside an operation's domain (bad node id, bad
// config field, too few points for a fit, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested data was never recorded (e.g. epoch trace on a run without it).
class AbsentData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace asuman
