#pragma once

#include <stdexcept>
#include <string>

namespace gibbspd {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyInput : Error {
  using Error::Error;
};

struct DuplicateGenerator : Error {
  using Error::Error;
};

struct OutOfWindow : Error {
  using Error::Error;
};

struct NegativePersistence : Error {
  using Error::Error;
};

struct EmptyDiagram : Error {
  using Error::Error;
};

struct Singular : Error {
  using Error::Error;
};

struct EmptySampleSet : Error {
  using Error::Error;
};

struct InvalidConfig : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace gibbspd
