#pragma once

#include <stdexcept>
#include <string>

namespace icbf {

// Every failure raised by the library derives from Error so callers can
// catch the whole family at once.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A time query fell outside the buffered input history.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// An integration produced NaN or Inf.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

// A custom class-K function was asked for an inverse it does not define.
class UnsupportedInverse : public Error {
 public:
  using Error::Error;
};

// A caller broke an API precondition (wrong barrier kind, bad dimensions).
class MisuseError : public Error {
 public:
  using Error::Error;
};

// The two-constraint safety filter had no solution and the configured
// fallback policy is `error`.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, long step)
      : Error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// Configuration text was rejected. `key()` names the offending entry.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string key)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace icbf
