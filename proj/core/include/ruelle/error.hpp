#pragma once

#include <stdexcept>
#include <string>

namespace ruelle {

enum class ErrorKind {
  precondition,
  enumeration_too_large,
  not_summable,
  no_periodic_point,
  zero_spectral_radius,
  non_converged,
  non_unique_dominant,
  singular,
  configuration,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::precondition, what);
}

}  // namespace ruelle
