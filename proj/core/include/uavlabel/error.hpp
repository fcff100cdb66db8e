#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace uavlabel {

enum class ErrorKind {
  Domain,               // precondition on a value violated
  Validation,           // malformed request or rejected input
  Configuration,        // bad parameter bundle or panel composition
  State,                // lifecycle violation (e.g. editing a submitted submission)
  Integrity,            // dangling reference between stored records
  Conflict,             // optimistic-concurrency sequence mismatch
  NotFound,
  Unauthenticated,
  Forbidden,
  MissingPrerequisite,  // e.g. an incomplete MajVote panel
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` drives HTTP status and
/// CLI exit-code mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] void fail(ErrorKind kind, std::string code, const std::string& message);

}  // namespace uavlabel
