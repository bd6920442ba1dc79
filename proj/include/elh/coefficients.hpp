#pragma once

// Leslie material coefficients, their algebraic relations and the two
// coefficient regimes under which the basic energy law is dissipative.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "common.hpp"

namespace elh {

/// Tolerance for equality tests on values that went through text I/O.
inline constexpr double kCoefficientTolerance = 1e-12;

struct LeslieCoefficients {
  double mu1 = 0, mu2 = 0, mu3 = 0, mu4 = 0, mu5 = 0, mu6 = 0;
  double lambda1 = 0, lambda2 = 0;
  double rho1 = 1;
  /// Only meaningful for the lambda1 == 0 regime.
  std::optional<double> delta;

  /// The five independent coefficients plus the inertial constant.
  /// mu2, mu3 and lambda2 are derived so that lambda1 = mu2 - mu3,
  /// lambda2 = mu5 - mu6 and Parodi's relation mu2 + mu3 = mu6 - mu5 hold.
  static LeslieCoefficients from_independent(double mu1, double mu4, double mu5,
                                             double mu6, double lambda1,
                                             double rho1) {
    if (!(rho1 > 0.0)) {
      fail(ErrorKind::Precondition,
           "rho1 must be > 0 (the rho1 = 0 parabolic system is not supported), got " +
               std::to_string(rho1));
    }
    LeslieCoefficients c;
    c.mu1 = mu1;
    c.mu4 = mu4;
    c.mu5 = mu5;
    c.mu6 = mu6;
    c.lambda1 = lambda1;
    c.lambda2 = mu5 - mu6;
    c.mu2 = 0.5 * (lambda1 - c.lambda2);
    c.mu3 = -0.5 * (lambda1 + c.lambda2);
    c.rho1 = rho1;
    return c;
  }

  /// True when the constructed relations hold within `tol` (0 means exact).
  bool relations_hold(double tol = 0.0) const {
    auto close = [tol](double a, double b) { return std::abs(a - b) <= tol; };
    return close(lambda1, mu2 - mu3) && close(lambda2, mu5 - mu6) &&
           close(mu2 + mu3, mu6 - mu5) && rho1 > 0.0;
  }

  bool operator==(const LeslieCoefficients&) const = default;
};

struct StrictDamping {};
struct ZeroLambda1 {
  double delta;
};
struct InvalidClass {
  std::string reason;
};

using DissipationClass = std::variant<StrictDamping, ZeroLambda1, InvalidClass>;

inline bool is_strict_damping(const DissipationClass& k) {
  return std::holds_alternative<StrictDamping>(k);
}
inline bool is_zero_lambda1(const DissipationClass& k) {
  return std::holds_alternative<ZeroLambda1>(k);
}
inline bool is_invalid(const DissipationClass& k) {
  return std::holds_alternative<InvalidClass>(k);
}

inline std::string describe(const DissipationClass& k) {
  if (is_strict_damping(k)) return "StrictDamping";
  if (auto* z = std::get_if<ZeroLambda1>(&k)) {
    std::ostringstream os;
    os << "ZeroLambda1(delta=" << z->delta << ")";
    return os.str();
  }
  return "Invalid(" + std::get<InvalidClass>(k).reason + ")";
}

/// Evaluates the two dissipative regimes exactly. `lambda1_tol` widens the
/// lambda1 == 0 test for coefficient sets that were parsed from text.
inline DissipationClass classify(const LeslieCoefficients& c,
                                 std::optional<double> delta = std::nullopt,
                                 double lambda1_tol = 0.0) {
  const bool lambda1_zero = std::abs(c.lambda1) <= lambda1_tol;
  if (lambda1_zero) {
    if (!delta) delta = c.delta;
    if (!delta) {
      fail(ErrorKind::Precondition, "delta in (0,1) is required when lambda1 = 0");
    }
    if (!(*delta > 0.0 && *delta < 1.0)) {
      fail(ErrorKind::Precondition,
           "delta must lie in (0,1), got " + std::to_string(*delta));
    }
  }
  if (!(c.mu1 >= 0.0)) return InvalidClass{"mu1 >= 0 violated"};
  if (!(c.mu4 > 0.0)) return InvalidClass{"mu4 > 0 violated"};
  if (lambda1_zero) {
    const double lhs = (1.0 - *delta) * c.mu4 * (c.mu5 + c.mu6);
    const double rhs = 2.0 * c.lambda2 * c.lambda2;
    if (!(lhs >= rhs)) {
      return InvalidClass{"(1 - delta) mu4 (mu5 + mu6) >= 2 lambda2^2 violated"};
    }
    return ZeroLambda1{*delta};
  }
  if (!(c.lambda1 < 0.0)) return InvalidClass{"lambda1 < 0 violated"};
  if (!(c.mu5 + c.mu6 + c.lambda2 * c.lambda2 / c.lambda1 >= 0.0)) {
    return InvalidClass{"mu5 + mu6 + lambda2^2 / lambda1 >= 0 violated"};
  }
  return StrictDamping{};
}

inline constexpr std::array<const char*, 3> kPresetNames = {
    "wave_map", "damped_default", "zero_lambda1_default"};

inline LeslieCoefficients preset(const std::string& name) {
  if (name == "wave_map") {
    // Navier-Stokes coupled with a wave map: every mu except mu4 vanishes.
    auto c = LeslieCoefficients::from_independent(0, 1, 0, 0, 0, 1);
    c.delta = 0.5;
    return c;
  }
  if (name == "damped_default") {
    return LeslieCoefficients::from_independent(1, 2, 1, 1, -1, 1);
  }
  if (name == "zero_lambda1_default") {
    auto c = LeslieCoefficients::from_independent(0, 4, 1, 0.5, 0, 1);
    c.delta = 0.5;
    return c;
  }
  std::string valid;
  for (auto* n : kPresetNames) valid += std::string(valid.empty() ? "" : ", ") + n;
  fail(ErrorKind::Precondition, "unknown preset '" + name + "'; valid: " + valid);
}

/// Upper bound for the weight eta of the modified energy functional, with
/// `estimate_constant` standing in for the unquantified Sobolev constant.
/// The (1 - |lambda2| / lambda1) factor is evaluated literally.
inline double eta0(const LeslieCoefficients& c, double estimate_constant) {
  if (!(c.lambda1 < 0.0)) {
    fail(ErrorKind::Precondition, "eta0 is defined only in the strict-damping case (lambda1 < 0)");
  }
  require(estimate_constant > 0.0, "eta0: estimate constant must be > 0");
  const double factor = 1.0 - std::abs(c.lambda2) / c.lambda1;
  const double coupling = std::abs(c.lambda1) + std::abs(c.lambda2);
  const double first =
      0.5 * c.mu4 /
      (3.0 * c.rho1 * factor * factor +
       estimate_constant * estimate_constant * coupling * coupling);
  return 0.5 * std::min({first, -c.lambda1 / (2.0 * c.rho1), 1.0 / c.rho1, 1.0});
}

}  // namespace elh
