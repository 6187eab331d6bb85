#ifndef MODALFUSE_ERRORS_HPP_
#define MODALFUSE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace modalfuse {

// Error taxonomy. The CLI maps these onto process exit codes:
// config/usage -> 1, data/format -> 2, numerical -> 3.

// Bad run configuration: invalid hyperparameters, unknown config keys,
// violated option constraints.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape or dimension mismatch between tensors/vectors.
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input outside an operation's mathematical domain (e.g. zero-norm vector).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file: bad magic, bad version, truncated payload.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid file whose contents violate dataset invariants
// (dangling ids, inconsistent dims).
struct IntegrityError : std::runtime_error {
    explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failure while reading or writing.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite value where a finite one is required (loss, gradient, payload).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace modalfuse

#endif  // MODALFUSE_ERRORS_HPP_
