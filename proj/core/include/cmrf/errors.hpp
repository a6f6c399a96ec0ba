#pragma once

#include <stdexcept>
#include <string>

namespace cmrf {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A pattern space or table would exceed the configured guard limit.
struct GuardExceeded : Error {
    using Error::Error;
};

// The constraint set admits no pattern at all.
struct EmptySupport : Error {
    using Error::Error;
};

// A document or in-memory object violates a structural invariant.
// The message names the offending section/key where known.
struct MalformedSpec : Error {
    using Error::Error;
};

// No label at the requested site completes the boundary inside C.
struct BoundaryNotExtendable : Error {
    using Error::Error;
};

// The initial pattern handed to the Gibbs sampler is outside C.
struct ConstraintViolatedInit : Error {
    using Error::Error;
};

} // namespace cmrf
