#pragma once

#include <stdexcept>
#include <string>

namespace mks {

enum class ErrorCode {
  EmptyDomain,
  DisconnectedDomain,
  InvalidLoop,
  InvalidConfig,
  NotAnnular,
  LoopTouchesBoundary,
  DomainTooLarge,
  StripTooWide,
  SingularMatrix,
  NumericalSingularity,
  NoCyclePossible,
  InsufficientData,
  NoEssentialAnnulus,
  ImageNotNested,
  NotInvertible,
  IterationBudgetExceeded,
  MonotonicityViolation,
  SpecParseError,
  GenerationExhausted,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mks
