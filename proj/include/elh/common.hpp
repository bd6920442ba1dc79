#pragma once

#include <array>
#include <numbers>
#include <stdexcept>
#include <string>

namespace elh {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Small fixed-size algebra for pointwise kernels. Only the leading `dim`
// entries are meaningful; the rest stay zero.
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

enum class ErrorKind {
  Precondition,
  Config,
  Cfl,
  BlowUp,
  NonConvergence,
};

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

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::Precondition, what);
}

}  // namespace elh
