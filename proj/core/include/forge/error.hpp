#pragma once

#include <stdexcept>
#include <string>

namespace forge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration, bad flags, missing config files. Maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data. Maps to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace forge
