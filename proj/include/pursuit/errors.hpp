#pragma once

#include <stdexcept>
#include <string>

namespace pursuit {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateBasis : Error {
  using Error::Error;
};
struct AssumptionViolated : Error {
  using Error::Error;
};
struct UnsupportedDimension : Error {
  using Error::Error;
};
struct AlreadyCaptured : Error {
  using Error::Error;
};
struct BracketNotFound : Error {
  using Error::Error;
};
struct NonFinite : Error {
  using Error::Error;
};
struct DegenerateXi : Error {
  using Error::Error;
};
struct NoRoot : Error {
  using Error::Error;
};
struct InsideTerminal : Error {
  using Error::Error;
};
struct DegenerateStart : Error {
  using Error::Error;
};
struct BadSpec : Error {
  using Error::Error;
};
struct StepTooCoarse : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace pursuit
