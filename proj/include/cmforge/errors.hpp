#pragma once

#include <stdexcept>
#include <string>

namespace cmforge {

// Bad user input or parameters violating the CM preconditions (exit code 2).
struct InvalidParameters : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The invariant has no N-system/class-field theorem for this discriminant.
struct UnsupportedInvariant : InvalidParameters {
    using InvalidParameters::InvalidParameters;
};

// Precision escalation hit the configured ceiling (exit code 3).
struct PrecisionExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Signal from the recovery step that the current precision was not enough.
struct PrecisionEscalation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An exact identity that must hold did not (exit code 4).
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

inline void check_internal(bool ok, const std::string& what) {
    if (!ok) throw InternalError(what);
}

}  // namespace cmforge
