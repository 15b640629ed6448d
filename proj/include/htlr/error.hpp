#pragma once

#include <stdexcept>
#include <string>

namespace htlr {

// Operand shapes or index lists that do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Grid/tree/build parameters outside what the construction supports.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A singular kernel evaluated at coincident points.
class SingularKernelError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or non-covering triangle mesh.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A relative error whose reference norm vanishes.
class UndefinedErrorMeasure : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

[[noreturn]] void throw_dimension(const std::string& what);

}  // namespace htlr
