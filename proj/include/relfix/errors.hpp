#pragma once

#include <stdexcept>
#include <string>

#include "relfix/source.hpp"

namespace relfix {

/// Base class for every error raised by the library. Carries an optional span.
class Error : public std::runtime_error {
 public:
  Error(const std::string& msg, SourceSpan span = {})
      : std::runtime_error(msg), span_(span) {}

  const SourceSpan& span() const noexcept { return span_; }

  /// "file:line:col: message" when a span is known, the bare message otherwise.
  std::string describe() const;

 private:
  SourceSpan span_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ResolveError : public Error {
 public:
  using Error::Error;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

class LocationError : public Error {
 public:
  enum class Kind { NoMatch, NotUnique, Forbidden, BadMarker };
  LocationError(Kind kind, const std::string& msg, SourceSpan span = {})
      : Error(msg, span), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

/// The scope is too large for the in-process search.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A solve call ran past its deadline.
class DeadlineExceeded : public Error {
 public:
  DeadlineExceeded() : Error("deadline exceeded") {}
};

}  // namespace relfix
