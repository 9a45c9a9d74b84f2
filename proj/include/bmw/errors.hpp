#pragma once

#include <stdexcept>
#include <string>

namespace bmw {

// Input data or configuration failed validation (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be read, written, or parsed (CLI exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric routine could not recover (CLI exit code 4).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bmw
