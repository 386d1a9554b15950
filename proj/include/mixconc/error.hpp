#pragma once

#include <stdexcept>
#include <string>

namespace mixconc {

enum class ErrorCode {
  InvalidArgument = 1,
  DimensionMismatch,
  NotErgodic,
  EnumerationLimit,
  NoConvergence,
  Parse,
  Io,
};

// Every failure raised by the library carries one of the codes above; the C
// layer maps them onto mixconc_status values one-to-one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace mixconc
