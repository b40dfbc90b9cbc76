#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace speedscale {

// Error taxonomy mirrors the CLI exit codes: input -> 2, infeasible -> 3,
// internal (failed self-audit) -> 4.
enum class ErrorKind { input, infeasible, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error input_error(std::string message) {
  return Error(ErrorKind::input, std::move(message));
}

inline Error infeasible_error(std::string message) {
  return Error(ErrorKind::infeasible, std::move(message));
}

inline Error internal_error(std::string message) {
  return Error(ErrorKind::internal, std::move(message));
}

}  // namespace speedscale
