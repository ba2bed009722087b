#pragma once

#include <stdexcept>
#include <string>

namespace entlab {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Tuple/state lengths disagree.
class DimensionError : public Error {
public:
  using Error::Error;
};

// A constructed object violates its invariants (weights negative, factor
// diameter above 1, cover not covering, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

class RangeError : public Error {
public:
  using Error::Error;
};

// Instance exceeds a memory or enumeration budget; the message reports the
// required count.
class ResourceError : public Error {
public:
  using Error::Error;
};

class CoverageError : public Error {
public:
  using Error::Error;
};

// No positive radius works at the sample's resolution.
class ResolutionError : public Error {
public:
  using Error::Error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

// Numerical rank straddles the pivot tolerance band.
class IndeterminateError : public Error {
public:
  using Error::Error;
};

class UsageError : public Error {
public:
  using Error::Error;
};

}  // namespace entlab
