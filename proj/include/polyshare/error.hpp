#pragma once

#include <stdexcept>
#include <string>

namespace polyshare {

/// Error taxonomy shared by the library and the CLI.
enum class ErrorKind {
  Usage,    // caller violated a precondition (mismatched spaces, bad args)
  Parse,    // DSL syntax / validation failure
  Schema,   // JSON schema violation
  Eval,     // evaluation failure (unbounded set, missing binding)
  Capacity, // simulated memory exceeds the cap
  Verify,   // prediction/simulation mismatch
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &msg) {
  throw Error(kind, msg);
}

inline void check(bool cond, ErrorKind kind, const std::string &msg) {
  if (!cond)
    fail(kind, msg);
}

} // namespace polyshare
