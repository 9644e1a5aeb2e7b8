#pragma once

#include <stdexcept>
#include <string>

namespace multiflow {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape/type misuse: mismatched grids, wrong rank for an operator,
// inconsistent phase counts, malformed containers.
struct StructuralError : Error {
    using Error::Error;
};

// Elliptic right-hand side fails the zero-mean solvability test.
struct SolvabilityError : Error {
    using Error::Error;
};

// Iterative solver hit its iteration cap before reaching tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

// A density left the positive cone.
struct PositivityError : Error {
    using Error::Error;
};

// Time step violates the advective CFL guard.
struct CflError : Error {
    using Error::Error;
};

// 1D flow map lost strict monotonicity (characteristics crossed).
struct FoldError : Error {
    using Error::Error;
};

// Config file rejected: syntax, unknown key, or invalid value.
struct ConfigError : Error {
    using Error::Error;
};

// Snapshot file rejected: bad magic, version, or truncation.
struct SnapshotError : Error {
    using Error::Error;
};

}  // namespace multiflow
