#pragma once

#include <stdexcept>
#include <string>

namespace zkeval {

// Every failure raised by the library carries a stable machine-readable code
// (used by the CLI's --json diagnostics) next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define ZKEVAL_DEFINE_ERROR(Name, code_str)                              \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& message) : Error(code_str, message) {} \
  }

ZKEVAL_DEFINE_ERROR(OverflowError, "overflow");
ZKEVAL_DEFINE_ERROR(SchemaError, "schema");
ZKEVAL_DEFINE_ERROR(ShapeError, "shape");
ZKEVAL_DEFINE_ERROR(CycleError, "cycle");
ZKEVAL_DEFINE_ERROR(UnsupportedOpError, "unsupported_op");
ZKEVAL_DEFINE_ERROR(DomainError, "domain");
ZKEVAL_DEFINE_ERROR(CalibrationFailure, "calibration_failure");
ZKEVAL_DEFINE_ERROR(LengthMismatch, "length_mismatch");
ZKEVAL_DEFINE_ERROR(WitnessMismatch, "witness_mismatch");
ZKEVAL_DEFINE_ERROR(UnsatisfiedWitness, "unsatisfied_witness");
ZKEVAL_DEFINE_ERROR(HashMismatch, "hash_mismatch");
ZKEVAL_DEFINE_ERROR(InvalidProof, "invalid_proof");
ZKEVAL_DEFINE_ERROR(MetricUnsupported, "metric_unsupported");
ZKEVAL_DEFINE_ERROR(ChallengeFailure, "challenge_failure");
ZKEVAL_DEFINE_ERROR(InsufficientData, "insufficient_data");
ZKEVAL_DEFINE_ERROR(FormatError, "format");
ZKEVAL_DEFINE_ERROR(IoError, "io");
ZKEVAL_DEFINE_ERROR(InvalidArgument, "invalid_argument");

#undef ZKEVAL_DEFINE_ERROR

}  // namespace zkeval
