#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace moocaug {

// Base of every exception thrown by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An error carrying a module-specific code. `Code` is a scoped enum.
template <typename Code>
class CodedError : public Error {
 public:
  CodedError(Code code, std::string message)
      : Error(std::move(message)), code_(code) {}

  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace moocaug
