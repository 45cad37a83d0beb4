#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace caext {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Ill-sorted term construction. `position` is the offending child index.
class SortMismatch : public Error
{
 public:
  SortMismatch(const std::string& msg, size_t position)
      : Error(msg), d_position(position)
  {
  }
  size_t position() const { return d_position; }

 private:
  size_t d_position;
};

/// Input uses a sort or operator outside the supported fragment.
class Unsupported : public Error
{
 public:
  using Error::Error;
};

/// Term evaluation hit a constant with no assigned value.
class UnassignedConstant : public Error
{
 public:
  using Error::Error;
};

/// A solver budget was exhausted before a verdict was reached.
class ResourceLimit : public Error
{
 public:
  using Error::Error;
};

/// An internal invariant of the calculus or the solver was violated.
class InvariantViolation : public Error
{
 public:
  using Error::Error;
};

/// Reason or updated-index lookup on an unset propagation step.
class UndefinedStep : public Error
{
 public:
  using Error::Error;
};

/// Model construction found two applicable cases that disagree.
class IllDefined : public Error
{
 public:
  using Error::Error;
};

/// Brute-force enumeration would exceed the configured bounds.
class BoundsExceeded : public Error
{
 public:
  using Error::Error;
};

}  // namespace caext
