#pragma once

#include <stdexcept>
#include <string>

namespace svq {

/// Model or CLI parameters outside their valid domain (maps to exit code 3).
struct InvalidParams : std::domain_error {
    using std::domain_error::domain_error;
};

/// Nothing to score: empty window, H + L = 0 (maps to exit code 2).
struct NoScorableData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input could not be parsed at all (maps to exit code 1).
struct ParseFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A delivered record for which no agreed delivery day can be derived.
struct ClassificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace svq
