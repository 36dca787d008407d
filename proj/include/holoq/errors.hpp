#pragma once
#include <stdexcept>

namespace holoq {

// Error taxonomy maps onto the CLI exit codes: parse/validation -> 2,
// numeric -> 3, io -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
  using Error::Error;
};
// Scenario-config syntax and schema faults; messages carry a $.path prefix
// pointing at the offending key or value.
struct ParseError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace holoq
