#pragma once

#include <stdexcept>
#include <string>

namespace isolump {

enum class ErrorKind {
  invalid_argument,
  invalid_degree,
  out_of_range,
  singular_jacobian,
  nonconforming_interface,
  inconsistent_maps,
  missing_structure,
  empty_system,
  nonpositive_diagonal,
  not_positive_definite,
  no_convergence,
  config,
  io,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a machine-checkable category. Numerical failures
/// (not_positive_definite, no_convergence, singular_jacobian) are the ones
/// the CLI maps to exit code 3.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::not_positive_definite || kind_ == ErrorKind::no_convergence ||
           kind_ == ErrorKind::singular_jacobian || kind_ == ErrorKind::nonpositive_diagonal;
  }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace isolump
