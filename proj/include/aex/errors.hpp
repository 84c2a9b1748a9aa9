#pragma once

#include <stdexcept>
#include <string>

namespace aex {

// Base for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Point/weight arity does not match the feature space.
struct DimensionError : Error {
  using Error::Error;
};

// Value outside its feature domain, or an operation applied to an
// incompatible domain kind.
struct DomainError : Error {
  using Error::Error;
};

// A precondition of an operation was violated by the caller.
struct PreconditionError : Error {
  using Error::Error;
};

// Instance label disagrees with the classifier at the instance point.
struct InvalidInstanceError : PreconditionError {
  using PreconditionError::PreconditionError;
};

// Requested operation is not defined for the given inputs (e.g. a
// meaningful-epsilon floor over a continuous domain).
struct NotApplicableError : Error {
  using Error::Error;
};

// Classifier, space, or constraint cannot be encoded to clauses/PB.
struct EncodingError : Error {
  using Error::Error;
};

// Malformed model/dataset/formula file.
struct ParseError : Error {
  explicit ParseError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_no(line) {}
  int line_no = 0;
};

// External solver misbehaved: bad protocol, crash, or a claimed model
// that fails re-verification.
struct BridgeError : Error {
  using Error::Error;
};

// Enumeration space exceeds the configured cap.
struct TooLargeError : Error {
  using Error::Error;
};

// Classifier proven constant over its feature space.
struct TrivialClassifierError : Error {
  using Error::Error;
};

// A decision could not be made within budget where the caller required one.
struct UnknownResultError : Error {
  using Error::Error;
};

// An adversarial example maps to an empty change set.
struct EmptyChangeError : Error {
  using Error::Error;
};

// Requested tolerance cannot be met.
struct PrecisionError : Error {
  using Error::Error;
};

// Internal soundness check failed (decoded witness does not verify).
struct SoundnessError : Error {
  using Error::Error;
};

}  // namespace aex
