#pragma once

#include <stdexcept>
#include <string>

namespace twt {

/// Base class for all simulation-domain failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Effective wind |Vv*cos(psi - alpha)| fell below the floor; the tip speed
/// ratio is undefined at this orientation.
class SingularOrientation : public Error {
public:
    using Error::Error;
};

/// Tip speed ratio is nonpositive; aerodynamic torque is undefined.
class DegenerateTipSpeed : public Error {
public:
    using Error::Error;
};

/// Fault severity outside [0, 1).
class InvalidSeverity : public Error {
public:
    using Error::Error;
};

/// Effective inductance matrix is numerically singular.
class SingularInductance : public Error {
public:
    using Error::Error;
};

/// Decoupling matrix is numerically singular; the linearizing control is
/// undefined at this state.
class SingularDecoupling : public Error {
public:
    using Error::Error;
};

/// Scenario configuration is invalid; the message names the offending key.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace twt
