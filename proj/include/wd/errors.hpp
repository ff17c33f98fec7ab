#pragma once

#include <stdexcept>
#include <string>

namespace wd {

// Malformed or out-of-contract inputs. The CLI maps this to exit code 1.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Request outside the implementation envelope (e.g. alphabet too large for
// the exact solver). Also exit code 1.
class capability_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A verified property failed to hold at runtime. Exit code 2.
class check_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace wd
