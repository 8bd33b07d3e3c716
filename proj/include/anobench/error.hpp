#pragma once

#include <stdexcept>
#include <string>

namespace anobench {

// Base class for every error this library reports. The CLI maps these to
// exit code 2 (data/validation error); anything else is a usage error.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input files (CSV bodies, schema sidecars, score files, specs).
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input that violates a contract (ragged rows, unknown
// case ids, non-finite values, schema mismatches).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Out-of-range or inconsistent analysis parameters.
class ParamError : public Error {
public:
    using Error::Error;
};

// A constrained construction (rejection sampling, tuple search) ran out of
// budget; the message names the failing constraint.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

}  // namespace anobench
