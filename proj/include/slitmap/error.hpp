#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace slitmap {

/// Failure categories. The CLI maps these onto its exit codes.
enum class ErrorKind {
  invalid_input,   // violated precondition or malformed domain data
  numerical,       // solver/inversion failure, ill-conditioning, period leak
  invariant,       // a checked invariant did not hold
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Short kebab-case reason, e.g. "boundary-proximity".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

/// Compact rendering of a double for error messages.
inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

[[noreturn]] inline void fail_input(std::string code, const std::string& message) {
  throw Error(ErrorKind::invalid_input, std::move(code), message);
}

[[noreturn]] inline void fail_numerical(std::string code, const std::string& message) {
  throw Error(ErrorKind::numerical, std::move(code), message);
}

[[noreturn]] inline void fail_invariant(std::string code, const std::string& message) {
  throw Error(ErrorKind::invariant, std::move(code), message);
}

}  // namespace slitmap
