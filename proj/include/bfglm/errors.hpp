#pragma once

#include <stdexcept>
#include <string>

namespace bfglm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivisionByZero : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct InsufficientTerms : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };

// Failures caused by an unlucky random choice. Solvers catch these and
// resample; everything else propagates.
struct RandomnessFailure : Error { using Error::Error; };
struct GenericityFailure : RandomnessFailure { using RandomnessFailure::RandomnessFailure; };
struct PrecisionFailure : RandomnessFailure { using RandomnessFailure::RandomnessFailure; };
struct NotCoprime : RandomnessFailure { using RandomnessFailure::RandomnessFailure; };
struct NonSeparating : RandomnessFailure { using RandomnessFailure::RandomnessFailure; };

struct UnluckyRandomness : Error { using Error::Error; };

}  // namespace bfglm
