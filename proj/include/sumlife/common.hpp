#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sumlife {

using TermId = std::uint32_t;
using VertexId = std::uint32_t;

inline constexpr TermId kNoTerm = 0xFFFFFFFFu;
inline constexpr VertexId kNoVertex = 0xFFFFFFFFu;

// Exception hierarchy. The CLI maps each family onto an exit code:
// IoError -> 1, ConfigError -> 2, NumericalError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sumlife
