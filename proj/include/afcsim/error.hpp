#pragma once

#include <stdexcept>
#include <string>

namespace afcsim {

// Base class for every error raised by the library. Callers that only care
// about "the simulation refused this input" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (negative field, empty range, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// The requested grid cannot represent the features it is asked to resolve.
class ResolutionError : public Error {
public:
    using Error::Error;
};

// Echo energy wraps around the FFT time window.
class AliasingError : public Error {
public:
    using Error::Error;
};

// A pump target cannot be realised with the given hardware.
class CompileError : public Error {
public:
    using Error::Error;
};

// A run configuration failed validation; the message starts with
// "<file>:<line>:".
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

} // namespace afcsim
