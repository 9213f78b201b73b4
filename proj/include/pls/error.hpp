#pragma once

#include <stdexcept>
#include <string>

namespace pls {

// All recoverable input/usage failures throw this type; internal logic bugs
// use assert instead.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pls
