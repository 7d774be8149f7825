#pragma once

#include <stdexcept>
#include <string>

namespace choquet {

enum class ErrorCode {
  invalid_argument,
  parse,
  universe_mismatch,
  domain,
  unsupported_capacity,
  precondition,
  malformed_utility,
  division,
  internal_invariant,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace choquet
