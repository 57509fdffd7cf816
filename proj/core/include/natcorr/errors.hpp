// errors.hpp: exception types with distinct meanings for callers and the CLI.

#pragma once

#include <stdexcept>
#include <string>

namespace natcorr {

/// The requested t -> infinity limit does not exist for this kernel (for
/// example an undamped discrete bath without explicit Abel regularization),
/// or a regularized integral hits an exact resonance.
class KernelIntegrabilityError : public std::runtime_error {
public:
    explicit KernelIntegrabilityError(const std::string& what)
        : std::runtime_error("kernel has no t->infinity limit: " + what) {}
};

/// An internal cross-check failed; indicates a bug rather than bad input.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace natcorr
