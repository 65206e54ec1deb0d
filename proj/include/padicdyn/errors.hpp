#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace padicdyn {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operands disagree on (p, k, n). Mixed-precision operations are never
/// coerced implicitly.
struct ShapeMismatch : Error {
    using Error::Error;
};

/// A table's reduction at some level is not well defined (the map is not
/// compatible at that level), so the requested level operation is meaningless.
struct IllFormed : Error {
    using Error::Error;
};

/// The (reduced) table is not a permutation.
struct NotBijective : Error {
    using Error::Error;
};

/// The (reduced) permutation is not a single cycle.
struct NotTransitive : Error {
    using Error::Error;
};

/// Orbit blocks of length p^k do not tile the cycles: start-class points are
/// not spaced exactly p^k apart (or a cycle has no start point).
struct PartitionError : Error {
    using Error::Error;
};

/// solve target is not a single-cycle permutation.
struct TargetNotSingleCycle : Error {
    using Error::Error;
};

/// solve target does not reduce to well-defined maps at lower levels.
struct TargetNotCompatible : Error {
    using Error::Error;
};

/// Internal-consistency failure of the permutation solver.
struct NoSolution : Error {
    using Error::Error;
};

/// A constructed object failed one of its construction-guaranteed checks.
/// Carries the first failing level and witness point.
struct VerificationFailure : Error {
    VerificationFailure(const std::string& what, std::uint32_t level_, std::uint64_t witness_)
        : Error(what), level(level_), witness(witness_) {}
    std::uint32_t level = 0;
    std::uint64_t witness = 0;
};

/// Rejection sampling gave up.
struct RetriesExhausted : Error {
    using Error::Error;
};

/// Malformed or invalid map-table / bundle file.
struct MapIoError : Error {
    using Error::Error;
};

}  // namespace padicdyn
