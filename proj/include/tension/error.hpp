#pragma once

#include <stdexcept>
#include <string>

namespace tension {

/// Failure categories. The CLI maps them one-to-one onto exit codes.
enum class ErrorKind {
  input = 1,           // malformed or inconsistent input
  infeasible = 2,      // no connected solution exists for the request
  non_convergence = 3  // iterative solver hit its iteration cap
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace tension
