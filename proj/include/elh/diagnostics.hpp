#pragma once

// Energy and dissipation functionals, the energy-law residual, the unit-length
// constraint monitor and the integration-by-parts identity checks.
//
// Integer-order Sobolev quantities are sums of full derivative arrays:
//   |f|^2_{H^s} = sum_{k=0}^{s} |grad^k f|^2,  |f|^2_{Hdot^s} = sum_{k=1}^{s} |grad^k f|^2.
// Integrals of nonlinear densities are evaluated on a padded grid (exact for
// band-limited inputs).

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "constitutive.hpp"
#include "dynamics.hpp"

namespace elh {

inline constexpr double kDissipationTolerance = 1e-10;

/// Quadrature rule for densities of degree <= 6 in the state.
inline Dealias diagnostic_rule() { return Dealias::padded(6); }

inline double basic_energy(const State& s, const LeslieCoefficients& c) {
  return 0.5 * (l2_norm_sq(s.u) + c.rho1 * l2_norm_sq(s.w) + l2_norm_sq(gradient(s.d)));
}

// ---------------------------------------------------------------------------
// Basic dissipation
// ---------------------------------------------------------------------------

struct DissipationTerms {
  double viscous = 0.0;  ///< mu4/2 |grad u|^2
  double mu1 = 0.0;      ///< mu1 |d.Ad|^2
  double lambda1 = 0.0;  ///< -lambda1 |w + Bd|^2
  double cross = 0.0;    ///< -2 lambda2 <w + Bd, Ad>
  double mu56 = 0.0;     ///< (mu5 + mu6) |Ad|^2
  double total = 0.0;
  /// Strict damping only: mu4/2 |grad u|^2 + mu1 |d.Ad|^2
  ///   - lambda1 |w + Bd + (lambda2/lambda1) Ad|^2 + (mu5 + mu6 + lambda2^2/lambda1) |Ad|^2
  std::optional<double> completed_square;
  /// Sum of the magnitudes of the terms; reference size for tolerances.
  double scale = 0.0;
};

namespace detail {

/// Integral over the box of a density sampled on `g`.
inline double integrate(double sum, const Grid& g) {
  return sum * g.volume() / static_cast<double>(g.size());
}

}  // namespace detail

inline DissipationTerms basic_dissipation(const State& s, const LeslieCoefficients& c,
                                          const Dealias& rule = diagnostic_rule()) {
  check_state(s);
  const int dim = s.u.grid.dim();
  ProductSpace space(s.u.grid, rule);
  Samples smp = sample(space, &s.u, &s.d, &s.w, {.grad_u = true, .d = true, .w = true});
  double n_sq = 0.0, ad_sq = 0.0, dad_sq = 0.0, n_ad = 0.0, sq_sq = 0.0;
  const bool strict = c.lambda1 < 0.0;
  const double ratio = strict ? c.lambda2 / c.lambda1 : 0.0;
  for (std::size_t p = 0; p < smp.size; ++p) {
    const Vec3 d = smp.vec(smp.d, p);
    const Vec3 w = smp.vec(smp.w, p);
    const Mat3 gu = smp.mat(smp.grad_u, p);
    const Vec3 bd = point::spin_times(point::spin(gu, dim), d, dim);
    const Vec3 ad = point::strain_times(point::strain(gu, dim), d, dim);
    Vec3 n{}, sq{};
    for (int i = 0; i < dim; ++i) {
      n[i] = w[i] + bd[i];
      sq[i] = n[i] + ratio * ad[i];
    }
    const double dad = point::dot(d, ad, dim);
    n_sq += point::dot(n, n, dim);
    ad_sq += point::dot(ad, ad, dim);
    dad_sq += dad * dad;
    n_ad += point::dot(n, ad, dim);
    sq_sq += point::dot(sq, sq, dim);
  }
  const Grid& pg = space.physical_grid();
  DissipationTerms t;
  t.viscous = 0.5 * c.mu4 * l2_norm_sq(gradient(s.u));
  t.mu1 = c.mu1 * detail::integrate(dad_sq, pg);
  t.lambda1 = -c.lambda1 * detail::integrate(n_sq, pg);
  t.cross = -2.0 * c.lambda2 * detail::integrate(n_ad, pg);
  t.mu56 = (c.mu5 + c.mu6) * detail::integrate(ad_sq, pg);
  t.total = t.viscous + t.mu1 + t.lambda1 + t.cross + t.mu56;
  t.scale = std::abs(t.viscous) + std::abs(t.mu1) + std::abs(t.lambda1) + std::abs(t.cross) +
            std::abs(t.mu56);
  if (strict) {
    const double cs = t.viscous + t.mu1 - c.lambda1 * detail::integrate(sq_sq, pg) +
                      (c.mu5 + c.mu6 + c.lambda2 * c.lambda2 / c.lambda1) *
                          detail::integrate(ad_sq, pg);
    t.completed_square = cs;
  }
  return t;
}

/// True when the two groupings of the strict-damping dissipation agree.
inline bool groupings_agree(const DissipationTerms& t, double tol = kDissipationTolerance) {
  if (!t.completed_square) return true;
  return std::abs(*t.completed_square - t.total) <= tol * (t.scale + 1e-30);
}

// ---------------------------------------------------------------------------
// Higher-order functionals
// ---------------------------------------------------------------------------

/// Per-order integrals of the derivative-array densities, k = 0..s.
struct DerivativeSums {
  std::vector<double> grad_u;   ///< |grad^{k+1} u|^2
  std::vector<double> dad;      ///< |d (grad^k A) d|^2
  std::vector<double> ad;       ///< |(grad^k A) d|^2
  std::vector<double> square;   ///< |grad^k w + (grad^k B) d + (lambda2/lambda1)(grad^k A) d|^2
  std::vector<double> spin_ad;  ///< |(grad^k B) d + (lambda2/lambda1)(grad^k A) d|^2
};

inline DerivativeSums derivative_sums(const State& s, const LeslieCoefficients& c, int s_order,
                                      const Dealias& rule = diagnostic_rule()) {
  require(s_order >= 0, "Sobolev order s must be a nonnegative integer");
  check_state(s);
  const Grid& g = s.u.grid;
  const int dim = g.dim();
  const double ratio = c.lambda1 != 0.0 ? c.lambda2 / c.lambda1 : 0.0;
  ProductSpace space(g, rule);
  const RealField dphys = space.to_physical(s.d);
  const Grid& pg = space.physical_grid();

  DerivativeSums out;
  for (auto* v : {&out.grad_u, &out.dad, &out.ad, &out.square, &out.spin_ad}) {
    v->assign(s_order + 1, 0.0);
  }
  Samples view;
  view.dim = dim;

  // Depth-first walk over non-decreasing axis sequences; each node stands for
  // the `weight` ordered multi-indices that are its permutations.
  auto visit = [&](auto&& self, const SpectralField& gu, const SpectralField& w, int k, int first,
                   std::array<int, 3> counts, double weight) -> void {
    const RealField gphys = space.to_physical(gu);
    const RealField wphys = space.to_physical(w);
    double dad = 0.0, ad = 0.0, sq = 0.0, sa = 0.0;
    for (std::size_t p = 0; p < pg.size(); ++p) {
      const Vec3 d = view.vec(dphys, p);
      const Vec3 wv = view.vec(wphys, p);
      const Mat3 m = view.mat(gphys, p);
      const Vec3 bdv = point::spin_times(point::spin(m, dim), d, dim);
      const Vec3 adv = point::strain_times(point::strain(m, dim), d, dim);
      const double x = point::dot(d, adv, dim);
      dad += x * x;
      for (int i = 0; i < dim; ++i) {
        const double y = bdv[i] + ratio * adv[i];
        ad += adv[i] * adv[i];
        sa += y * y;
        sq += (wv[i] + y) * (wv[i] + y);
      }
    }
    out.dad[k] += weight * detail::integrate(dad, pg);
    out.ad[k] += weight * detail::integrate(ad, pg);
    out.square[k] += weight * detail::integrate(sq, pg);
    out.spin_ad[k] += weight * detail::integrate(sa, pg);
    if (k == s_order) return;
    for (int axis = first; axis < dim; ++axis) {
      std::array<int, 3> next = counts;
      ++next[axis];
      // Multinomial update: (k+1)! / prod(m!) from k! / prod(m!).
      self(self, partial(gu, axis), partial(w, axis), k + 1, axis, next,
           weight * (k + 1) / next[axis]);
    }
  };
  visit(visit, gradient(s.u), s.w, 0, 0, {0, 0, 0}, 1.0);

  for (int k = 0; k <= s_order; ++k) {
    const int order = k + 1;
    out.grad_u[k] = weighted_norm_sq(s.u, [order](double k2) { return std::pow(k2, order); });
  }
  return out;
}

enum class HsVariant { StrictDamping, ZeroLambda1 };

inline std::string to_string(HsVariant v) {
  return v == HsVariant::StrictDamping ? "strict_damping" : "zero_lambda1";
}

struct HsFunctionals {
  double energy = 0.0;       ///< E(t)
  double dissipation = 0.0;  ///< D(t)
};

/// E(t) = |u|^2_{H^s} + rho1 |w|^2_{H^s} + |grad d|^2_{H^s}
inline double hs_energy(const State& s, const LeslieCoefficients& c, int s_order) {
  require(s_order >= 0, "Sobolev order s must be a nonnegative integer");
  return sobolev_sq(s.u, s_order) + c.rho1 * sobolev_sq(s.w, s_order) +
         sobolev_sq(s.d, s_order + 1, 1);
}

/// Variant for a coefficient set, or nullopt outside both dissipative classes.
inline std::optional<HsVariant> variant_for(const LeslieCoefficients& c) {
  const DissipationClass k = classify(c);
  if (is_strict_damping(k)) return HsVariant::StrictDamping;
  if (is_zero_lambda1(k)) return HsVariant::ZeroLambda1;
  return std::nullopt;
}

namespace detail {

inline DissipationClass check_hs_variant(const LeslieCoefficients& c, HsVariant variant) {
  const DissipationClass k = classify(c);
  const bool ok = variant == HsVariant::StrictDamping ? is_strict_damping(k) : is_zero_lambda1(k);
  if (!ok) {
    fail(ErrorKind::Precondition, "hs_functionals: variant " + to_string(variant) +
                                      " does not match coefficient class " + describe(k));
  }
  return k;
}

}  // namespace detail

/// As hs_functionals, with the derivative sums supplied by the caller.
inline HsFunctionals hs_functionals(const State& s, const LeslieCoefficients& c, int s_order,
                                    HsVariant variant, const DerivativeSums& ds) {
  const DissipationClass k = detail::check_hs_variant(c, variant);
  require(ds.grad_u.size() == static_cast<std::size_t>(s_order + 1),
          "hs_functionals: derivative sums computed for a different order");
  HsFunctionals f;
  f.energy = hs_energy(s, c, s_order);
  double grad_u = 0.0, dad = 0.0, ad = 0.0, sq = 0.0;
  for (int j = 0; j <= s_order; ++j) {
    grad_u += ds.grad_u[j];
    dad += ds.dad[j];
    ad += ds.ad[j];
    sq += ds.square[j];
  }
  if (variant == HsVariant::StrictDamping) {
    f.dissipation = 0.5 * c.mu4 * grad_u + c.mu1 * dad - c.lambda1 * sq +
                    (c.mu5 + c.mu6 + c.lambda2 * c.lambda2 / c.lambda1) * ad;
  } else {
    const double delta = std::get<ZeroLambda1>(k).delta;
    const double m = (1.0 - delta) * c.mu4;
    double squares = 0.0;
    for (int j = 0; j <= s_order; ++j) {
      const double x = std::sqrt(ds.grad_u[j]) - 2.0 * std::abs(c.lambda2) / m * std::sqrt(ds.ad[j]);
      squares += x * x;
    }
    f.dissipation = 0.25 * delta * c.mu4 * grad_u + c.mu1 * dad +
                    (c.mu5 + c.mu6 - 2.0 * c.lambda2 * c.lambda2 / m) * ad + 0.5 * m * squares;
  }
  return f;
}

inline HsFunctionals hs_functionals(const State& s, const LeslieCoefficients& c, int s_order,
                                    HsVariant variant, const Dealias& rule = diagnostic_rule()) {
  detail::check_hs_variant(c, variant);
  return hs_functionals(s, c, s_order, variant, derivative_sums(s, c, s_order, rule));
}

struct ModifiedFunctionals {
  double energy = 0.0;       ///< E_eta
  double dissipation = 0.0;  ///< D_eta
  double reference = 0.0;    ///< (|u|^2 + rho1 |w|^2 + |grad d|^2)_{H^s}
  double lower = 0.0;        ///< C_# * reference
  double upper = 0.0;        ///< C^# * reference
  bool sandwich_holds = false;
};

inline double sandwich_upper_constant(const LeslieCoefficients& c, double eta0_value) {
  return 4.0 + 2.0 * eta0_value - c.lambda1 * eta0_value + 2.0 * c.rho1 * eta0_value;
}

inline double sandwich_lower_constant(const LeslieCoefficients& c, double eta0_value) {
  return std::min({1.0, 1.0 - eta0_value, 1.0 - eta0_value * c.rho1});
}

namespace detail {

inline void check_modified_args(const LeslieCoefficients& c, int s_order, double eta,
                                double eta0_value) {
  const DissipationClass k = classify(c);
  if (!is_strict_damping(k)) {
    fail(ErrorKind::Precondition,
         "modified functionals need a strict-damping coefficient set, got " + describe(k));
  }
  if (!(eta > 0.0 && eta <= eta0_value)) {
    std::ostringstream os;
    os << "eta must lie in (0, eta0] with eta0 = " << eta0_value << ", got " << eta;
    fail(ErrorKind::Precondition, os.str());
  }
  require(s_order >= 1, "modified functionals need s >= 1");
}

}  // namespace detail

/// As modified_functionals, with the derivative sums supplied by the caller.
inline ModifiedFunctionals modified_functionals(const State& s, const LeslieCoefficients& c,
                                                int s_order, double eta, double eta0_value,
                                                const DerivativeSums& ds) {
  detail::check_modified_args(c, s_order, eta, eta0_value);
  require(ds.grad_u.size() == static_cast<std::size_t>(s_order + 1),
          "modified_functionals: derivative sums computed for a different order");
  const double l1 = c.lambda1, r1 = c.rho1;
  const int top = s_order + 1;

  ModifiedFunctionals m;
  m.energy = sobolev_sq(s.u, s_order) +
             (-eta * l1 + 1.0 - eta * r1) * sobolev_sq(s.d, s_order, 1) +
             weighted_norm_sq(s.d, [top](double k2) { return std::pow(k2, top); }) +
             r1 * (1.0 - eta) * sobolev_sq(s.w, s_order) + r1 * eta * l2_norm_sq(s.w) +
             eta * r1 * sobolev_sq(s.w + s.d, s_order, 1);

  double grad_u = 0.0, dad = 0.0, ad = 0.0, sq = 0.0, sa = 0.0;
  for (int j = 0; j <= s_order; ++j) {
    grad_u += ds.grad_u[j];
    dad += ds.dad[j];
    ad += ds.ad[j];
    sq += ds.square[j];
    if (j >= 1) sa += ds.spin_ad[j];
  }
  m.dissipation = 0.25 * c.mu4 * grad_u + 0.25 * eta * sobolev_sq(s.d, s_order + 1, 1) -
                  0.5 * l1 * sq + c.mu1 * dad +
                  (c.mu5 + c.mu6 + c.lambda2 * c.lambda2 / l1) * ad + 3.0 * eta * r1 * sa;

  m.reference = hs_energy(s, c, s_order);
  m.lower = sandwich_lower_constant(c, eta0_value) * m.reference;
  m.upper = sandwich_upper_constant(c, eta0_value) * m.reference;
  const double slack = 1e-12 * (m.reference + 1e-300);
  m.sandwich_holds = m.lower <= m.energy + slack && m.energy <= m.upper + slack;
  return m;
}

inline ModifiedFunctionals modified_functionals(const State& s, const LeslieCoefficients& c,
                                                int s_order, double eta, double eta0_value,
                                                const Dealias& rule = diagnostic_rule()) {
  detail::check_modified_args(c, s_order, eta, eta0_value);
  return modified_functionals(s, c, s_order, eta, eta0_value, derivative_sums(s, c, s_order, rule));
}

// ---------------------------------------------------------------------------
// Constraint monitor
// ---------------------------------------------------------------------------

struct ConstraintDrift {
  double h_max = 0.0;         ///< max |h|, h = |d|^2 - 1
  double h_l2 = 0.0;          ///< |h|_{L^2}
  double tangency_max = 0.0;  ///< max |d.w| (= |dh/dt| / 2 along trajectories)
};

inline ConstraintDrift constraint_monitor(const SpectralField& d, const SpectralField& w) {
  require(d.grid == w.grid && d.components == w.components,
          "constraint_monitor: d and w layouts differ");
  const Grid& g = d.grid;
  const int dim = g.dim();
  require(d.components == dim, "constraint_monitor: d must be a vector field");
  const RealField dp = inverse(d);
  const RealField wp = inverse(w);
  ConstraintDrift r;
  double h2 = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    double n2 = 0.0, dw = 0.0;
    for (int i = 0; i < dim; ++i) {
      n2 += dp.at(i, p) * dp.at(i, p);
      dw += dp.at(i, p) * wp.at(i, p);
    }
    const double h = n2 - 1.0;
    r.h_max = std::max(r.h_max, std::abs(h));
    r.tangency_max = std::max(r.tangency_max, std::abs(dw));
    h2 += h * h;
  }
  r.h_l2 = std::sqrt(detail::integrate(h2, g));
  return r;
}

// ---------------------------------------------------------------------------
// Energy-law residual
// ---------------------------------------------------------------------------

struct EnergySample {
  double t = 0.0;
  double energy = 0.0;       ///< basic energy
  double dissipation = 0.0;  ///< basic dissipation total
};

struct ResidualPoint {
  std::size_t index = 0;  ///< sample the residual is centred on
  double t = 0.0;
  double absolute = 0.0;
  double relative = 0.0;
};

/// Residual of dE/dt + D = 0 at interior samples: centred difference of E
/// against the Simpson average (D_{i-1} + 4 D_i + D_{i+1}) / 6, which is the
/// mean of D over [t_{i-1}, t_{i+1}] to fourth order. Relative values are
/// normalized by max D + 1e-30.
inline std::vector<ResidualPoint> energy_residual(const std::vector<EnergySample>& samples) {
  if (samples.size() < 3) {
    fail(ErrorKind::Precondition, "energy_residual needs at least 3 samples, got " +
                                      std::to_string(samples.size()));
  }
  const double h = samples[1].t - samples[0].t;
  require(h > 0.0, "energy_residual: sample times must increase");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double hi = samples[i].t - samples[i - 1].t;
    if (std::abs(hi - h) > 1e-9 * std::max(1.0, std::abs(samples[i].t))) {
      fail(ErrorKind::Precondition, "energy_residual: samples must be uniformly spaced");
    }
  }
  double dmax = 0.0;
  for (const auto& s : samples) dmax = std::max(dmax, s.dissipation);
  std::vector<ResidualPoint> out;
  out.reserve(samples.size() - 2);
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const double dedt = (samples[i + 1].energy - samples[i - 1].energy) / (2.0 * h);
    const double dbar =
        (samples[i - 1].dissipation + 4.0 * samples[i].dissipation + samples[i + 1].dissipation) /
        6.0;
    ResidualPoint r;
    r.index = i;
    r.t = samples[i].t;
    r.absolute = dedt + dbar;
    r.relative = std::abs(r.absolute) / (dmax + 1e-30);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

struct IdentityResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double error = 0.0;  ///< |lhs - rhs|
  double scale = 0.0;  ///< |lhs| + |rhs| + 1e-30
  bool pass = false;
};

struct IdentityReport {
  std::vector<IdentityResult> results;
  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
};

inline constexpr double kIdentityTolerance = 1e-10;

/// Evaluates the four stress/dissipation identities
///   <div sigma_mu1, u>        = -mu1 |d.Ad|^2
///   <div sigma_mu23(w=0), u>  = lambda1 |Bd|^2 + lambda2 <Bd, Ad>
///   <div sigma_mu56, u>       = -(mu5 + mu6) |Ad|^2 + lambda2 <Ad, Bd>
///   <div sigma_mu23(w), u> - <div sigma_mu23(0), u> = lambda2 <w, Ad> + lambda1 <w, Bd>
/// The left sides go through the production stress (with the other
/// coefficients zeroed) and a spectral divergence; the right sides through
/// alias-free products. Exact for inputs band-limited to |k| <= n/8.
inline IdentityReport identity_suite(const SpectralField& u, const SpectralField& d,
                                     const SpectralField& w, const LeslieCoefficients& c,
                                     double tol = kIdentityTolerance) {
  check_state_fields(u, d, w);
  const Grid& g = u.grid;
  const int dim = g.dim();
  const Dealias stress_rule = Dealias::padded(5);

  auto only = [&](double mu1, double mu2, double mu3, double mu5, double mu6) {
    LeslieCoefficients k = c;
    k.mu1 = mu1;
    k.mu2 = mu2;
    k.mu3 = mu3;
    k.mu5 = mu5;
    k.mu6 = mu6;
    return k;
  };
  const SpectralField zero_w(g, dim);
  auto lhs = [&](const LeslieCoefficients& k, const SpectralField& ww) {
    return inner(leslie_stress(u, d, ww, k, stress_rule).div_sigma, u);
  };
  const double l_mu1 = lhs(only(c.mu1, 0, 0, 0, 0), w);
  const double l_mu23_0 = lhs(only(0, c.mu2, c.mu3, 0, 0), zero_w);
  const double l_mu23_w = lhs(only(0, c.mu2, c.mu3, 0, 0), w);
  const double l_mu56 = lhs(only(0, 0, 0, c.mu5, c.mu6), w);

  // Right sides: Ad, Bd and d.Ad as alias-free cubic products.
  ProductSpace space(g, Dealias::padded(3));
  Samples smp = sample(space, &u, &d, &w, {.grad_u = true, .d = true});
  const Grid& pg = space.physical_grid();
  RealField ad(pg, dim), bd(pg, dim), dad(pg, 1);
  for (std::size_t p = 0; p < smp.size; ++p) {
    const Vec3 dv = smp.vec(smp.d, p);
    const Mat3 gu = smp.mat(smp.grad_u, p);
    const Vec3 a = point::strain_times(point::strain(gu, dim), dv, dim);
    const Vec3 b = point::spin_times(point::spin(gu, dim), dv, dim);
    for (int i = 0; i < dim; ++i) {
      ad.at(i, p) = a[i];
      bd.at(i, p) = b[i];
    }
    dad.at(0, p) = point::dot(dv, a, dim);
  }
  const SpectralField AD = space.from_physical(ad);
  const SpectralField BD = space.from_physical(bd);
  const SpectralField DAD = space.from_physical(dad);

  const double r_mu1 = -c.mu1 * l2_norm_sq(DAD);
  const double r_mu23 = c.lambda1 * l2_norm_sq(BD) + c.lambda2 * inner(BD, AD);
  const double r_mu56 = -(c.mu5 + c.mu6) * l2_norm_sq(AD) + c.lambda2 * inner(AD, BD);
  const double r_w = c.lambda2 * inner(w, AD) + c.lambda1 * inner(w, BD);

  IdentityReport rep;
  auto add = [&](const char* name, double l, double r) {
    IdentityResult x;
    x.name = name;
    x.lhs = l;
    x.rhs = r;
    x.error = std::abs(l - r);
    x.scale = std::abs(l) + std::abs(r) + 1e-30;
    x.pass = x.error <= tol * x.scale;
    rep.results.push_back(x);
  };
  add("mu1_stress", l_mu1, r_mu1);
  add("spin_stress", l_mu23_0, r_mu23);
  add("strain_stress", l_mu56, r_mu56);
  add("director_rate_stress", l_mu23_w - l_mu23_0, r_w);
  return rep;
}

// ---------------------------------------------------------------------------
// Per-sample record
// ---------------------------------------------------------------------------

struct DiagnosticsRecord {
  double t = 0.0;
  double basic_energy = 0.0;
  DissipationTerms dissipation;
  std::optional<double> hs_energy;
  std::optional<double> hs_dissipation;
  std::optional<double> modified_energy;
  std::optional<double> modified_dissipation;
  ConstraintDrift drift;
  std::optional<double> energy_residual;
};

struct DiagnosticsSettings {
  int s = 2;
  /// Weight of the modified functional (strict-damping runs only).
  std::optional<double> eta;
  /// Upper bound eta0 used for the sandwich constants.
  std::optional<double> eta0;
  bool hs = true;
};

/// Smallest integer s exceeding dim/2 + 1.
inline int default_sobolev_order(int dim) { return dim == 2 ? 2 : 3; }

inline DiagnosticsRecord diagnose(const State& s, const LeslieCoefficients& c,
                                  const DiagnosticsSettings& set) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.basic_energy = basic_energy(s, c);
  r.dissipation = basic_dissipation(s, c);
  r.drift = constraint_monitor(s.d, s.w);
  const std::optional<HsVariant> v = variant_for(c);
  const bool want_eta = set.eta && set.eta0;
  std::optional<DerivativeSums> ds;
  if ((set.hs && v) || want_eta) ds = derivative_sums(s, c, set.s);
  if (set.hs) {
    if (v) {
      const HsFunctionals f = hs_functionals(s, c, set.s, *v, *ds);
      r.hs_energy = f.energy;
      r.hs_dissipation = f.dissipation;
    } else {
      r.hs_energy = hs_energy(s, c, set.s);
    }
  }
  if (want_eta) {
    const ModifiedFunctionals m = modified_functionals(s, c, set.s, *set.eta, *set.eta0, *ds);
    r.modified_energy = m.energy;
    r.modified_dissipation = m.dissipation;
  }
  return r;
}

/// Fills energy_residual on every interior record of a uniformly sampled run.
inline void fill_energy_residuals(std::vector<DiagnosticsRecord>& records) {
  if (records.size() < 3) return;
  std::vector<EnergySample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) samples.push_back({r.t, r.basic_energy, r.dissipation.total});
  for (const auto& p : energy_residual(samples)) records[p.index].energy_residual = p.relative;
}

}  // namespace elh
