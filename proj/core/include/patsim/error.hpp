#pragma once

#include <stdexcept>
#include <string>

namespace patsim {

/// Input that violates a documented format or precondition. The CLI maps
/// this to exit code 2; anything else escaping a stage is an internal error.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage was asked to run before the stage producing its inputs.
class MissingArtifactError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace patsim
