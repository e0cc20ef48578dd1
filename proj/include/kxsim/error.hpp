#pragma once

#include <stdexcept>
#include <string>

namespace kxsim {

/// Invalid parameters or inputs detected before or during a run. The message
/// names the offending field where one exists.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke an API precondition (programming error). Runs abort on it.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace kxsim
