#pragma once

#include <stdexcept>
#include <string>

namespace efo {

// Error categories map onto CLI exit codes: Usage -> 2, the validation
// family (NotEfo1/Trivial/SelfLoop/Disconnected/Config) -> 3, Limit -> 4.
enum class ErrorCode {
  Io,
  Parse,
  Usage,
  Config,
  NotEfo1,
  TrivialSubsentence,
  ConstantSelfLoop,
  DisconnectedClause,
  Validation,
  Limit,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace efo
