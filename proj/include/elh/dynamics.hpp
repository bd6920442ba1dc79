#pragma once

// Time evolution of the reduced system in first-order form.
//
// Unknowns: velocity u (divergence free), director d and its material
// derivative w. With P the Leray projector,
//
//   du/dt = P[ -u.grad u + mu4/2 lap u - div(grad d . grad d) + div sigma ]
//   dd/dt = w - u.grad d
//   dw/dt = -u.grad w + (lap d + gamma d + lambda1 (w + Bd) + lambda2 Ad) / rho1
//
// The unit-length constraint on d is not imposed: the multiplier gamma makes
// |d| = 1 propagate from compatible initial data.

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "constitutive.hpp"
#include "rng.hpp"

namespace elh {

struct State {
  double t = 0.0;
  SpectralField u, d, w;
};

enum class Integrator { RK4, IFRK4, Auto, Picard };

inline std::string to_string(Integrator i) {
  switch (i) {
    case Integrator::RK4: return "rk4";
    case Integrator::IFRK4: return "ifrk4";
    case Integrator::Auto: return "auto";
    case Integrator::Picard: return "picard";
  }
  return "?";
}

struct PicardSettings {
  int max_iters = 50;
  double tolerance = 1e-12;
  int max_inner_sweeps = 100;
  bool operator==(const PicardSettings&) const = default;
};

struct SolverConfig {
  double dt = 1e-3;
  Integrator integrator = Integrator::Auto;
  Dealias dealias = Dealias::two_thirds();
  std::optional<PicardSettings> picard;
  double cfl_safety = 0.9;
  /// Renormalize d pointwise every N steps (0 = never). Off by default.
  int renormalize_every = 0;
  /// Control experiment: drop the -lambda2 d.Ad part of gamma.
  bool drop_gamma_lambda2 = false;
};

/// Options for a single right-hand-side evaluation.
struct RhsOptions {
  Dealias dealias = Dealias::two_thirds();
  bool include_viscous = true;
  bool drop_gamma_lambda2 = false;
  /// Evolve only (d, w); u is treated as given and du/dt is left empty.
  bool director_only = false;
  /// Sharp Fourier cutoff applied to the director rates.
  std::optional<double> mollify_eps;
};

struct Rates {
  SpectralField du, dd, dw;
};

// ---------------------------------------------------------------------------
// Right-hand side
// ---------------------------------------------------------------------------

inline void check_state(const State& s) {
  check_state_fields(s.u, s.d, s.w);
}

inline Rates rhs(const State& s, const LeslieCoefficients& c, const RhsOptions& opt = {}) {
  if (!(c.rho1 > 0.0)) fail(ErrorKind::Precondition, "rhs: rho1 must be > 0");
  check_state(s);
  const Grid& g = s.u.grid;
  const int dim = g.dim();
  const bool momentum = !opt.director_only;
  const bool has_stress = c.mu1 != 0 || c.mu2 != 0 || c.mu3 != 0 || c.mu5 != 0 || c.mu6 != 0;

  ProductSpace space(g, opt.dealias);
  Samples smp = sample(space, &s.u, &s.d, &s.w,
                       {.u = true, .grad_u = true, .d = true, .grad_d = true, .w = true,
                        .grad_w = true});
  const Grid& pg = space.physical_grid();
  RealField stress, adv_u;
  if (momentum) {
    stress = RealField(pg, dim * dim);
    adv_u = RealField(pg, dim);
  }
  RealField adv_d(pg, dim), forcing_w(pg, dim);
  const double lambda2_gamma = opt.drop_gamma_lambda2 ? 0.0 : c.lambda2;

  for (std::size_t p = 0; p < smp.size; ++p) {
    const Vec3 u = smp.vec(smp.u, p);
    const Vec3 d = smp.vec(smp.d, p);
    const Vec3 w = smp.vec(smp.w, p);
    const Mat3 gu = smp.mat(smp.grad_u, p);
    const Mat3 gd = smp.mat(smp.grad_d, p);
    const Mat3 gw = smp.mat(smp.grad_w, p);
    const Mat3 a = point::strain(gu, dim);
    const Mat3 b = point::spin(gu, dim);
    const Vec3 bd = point::spin_times(b, d, dim);
    const Vec3 ad = point::strain_times(a, d, dim);
    const double gamma = point::lagrange_multiplier(c.rho1, lambda2_gamma, d, w, gd, a, dim);

    for (int i = 0; i < dim; ++i) {
      double ud = 0.0, uw = 0.0;
      for (int j = 0; j < dim; ++j) {
        ud += u[j] * gd[i][j];
        uw += u[j] * gw[i][j];
      }
      adv_d.at(i, p) = ud;
      forcing_w.at(i, p) =
          -uw + (gamma * d[i] + c.lambda1 * bd[i] + c.lambda2 * ad[i]) / c.rho1;
    }
    if (momentum) {
      const Mat3 el = point::ericksen(gd, dim);
      const Mat3 sg = has_stress ? point::leslie_stress(c, d, w, a, b, dim) : Mat3{};
      for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i)
          stress.at(tensor_index(dim, j, i), p) = sg[j][i] - el[j][i];
      for (int i = 0; i < dim; ++i) {
        double uu = 0.0;
        for (int j = 0; j < dim; ++j) uu += u[j] * gu[i][j];
        adv_u.at(i, p) = -uu;
      }
    }
  }

  Rates r;
  if (momentum) {
    SpectralField f = space.from_physical(adv_u) +
                      divergence(space.from_physical(stress), Contract::First);
    if (opt.include_viscous) f += (0.5 * c.mu4) * laplacian(s.u);
    r.du = leray_project(f);
  }
  r.dd = s.w - space.from_physical(adv_d);
  r.dw = space.from_physical(forcing_w) +
         (1.0 / c.rho1) * (laplacian(s.d) + c.lambda1 * s.w);
  if (opt.mollify_eps) {
    r.dd = mollify(r.dd, *opt.mollify_eps);
    r.dw = mollify(r.dw, *opt.mollify_eps);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Time-step limits
// ---------------------------------------------------------------------------

struct StepLimits {
  double advective = INFINITY;
  double viscous = INFINITY;  ///< plain RK4 only
  double wave = INFINITY;
};

inline StepLimits step_limits(const Grid& g, const LeslieCoefficients& c, const Dealias& rule,
                              double max_speed) {
  StepLimits lim;
  const double k2 = max_retained_k2(g, rule);
  if (max_speed > 0.0) lim.advective = g.spacing() / max_speed;
  if (c.mu4 > 0.0) lim.viscous = 2.8 / (0.5 * c.mu4 * k2);
  lim.wave = 2.8 * std::sqrt(c.rho1) / std::sqrt(k2);
  return lim;
}

/// Integrator actually used for a configured choice: Auto switches to the
/// integrating-factor variant once mu4 k_max^2 dt > 2.
inline Integrator resolve_integrator(const Grid& g, const LeslieCoefficients& c,
                                     const SolverConfig& cfg) {
  if (cfg.integrator != Integrator::Auto) return cfg.integrator;
  const double k2 = max_retained_k2(g, cfg.dealias);
  return c.mu4 * k2 * cfg.dt > 2.0 ? Integrator::IFRK4 : Integrator::RK4;
}

/// Throws ErrorKind::Cfl naming the violated limit.
inline void validate_time_step(const Grid& g, const LeslieCoefficients& c,
                               const SolverConfig& cfg, double max_speed) {
  if (!(cfg.dt > 0.0)) fail(ErrorKind::Cfl, "dt must be > 0");
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0)) {
    fail(ErrorKind::Cfl, "cfl_safety must lie in (0, 1]");
  }
  const StepLimits lim = step_limits(g, c, cfg.dealias, max_speed);
  const Integrator integ = resolve_integrator(g, c, cfg);
  auto check = [&](double limit, const char* name) {
    const double allowed = cfg.cfl_safety * limit;
    if (cfg.dt > allowed) {
      std::ostringstream os;
      os << "time step " << cfg.dt << " exceeds the " << name << " limit " << allowed
         << " (cfl_safety " << cfg.cfl_safety << ")";
      fail(ErrorKind::Cfl, os.str());
    }
  };
  check(lim.advective, "advective");
  check(lim.wave, "director wave-speed");
  if (integ == Integrator::RK4) check(lim.viscous, "viscous (plain RK4)");
}

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------

inline constexpr double kBlowUpThreshold = 1e8;

inline double max_norm(const SpectralField& f) { return max_abs(inverse(f)); }

/// Throws ErrorKind::BlowUp on non-finite values or fields above 1e8.
inline void check_blow_up(const State& s) {
  const bool finite = all_finite(s.u) && all_finite(s.d) && all_finite(s.w);
  double m = 0.0;
  if (finite) m = std::max({max_norm(s.u), max_norm(s.d), max_norm(s.w)});
  if (!finite || m > kBlowUpThreshold) {
    std::ostringstream os;
    os << "blow-up at t=" << s.t << ": " << (finite ? "max-norm " : "non-finite values")
       << (finite ? std::to_string(m) : std::string());
    fail(ErrorKind::BlowUp, os.str());
  }
}

namespace detail {

inline State combine(const State& base, double h, const Rates& r, bool with_u) {
  State s = base;
  if (with_u) s.u = axpy(base.u, h, r.du);
  s.d = axpy(base.d, h, r.dd);
  s.w = axpy(base.w, h, r.dw);
  return s;
}

inline SpectralField heat_factor(const SpectralField& f, double mu4, double tau) {
  const double a = 0.5 * mu4 * tau;
  return apply_multiplier(f, [&](std::size_t p) { return std::exp(-a * f.grid.k2(p)); });
}

inline void finish_step(State& s, const Dealias& rule, bool with_u) {
  if (with_u) {
    s.u = leray_project(s.u);
    if (rule.kind == Dealias::Kind::TwoThirds) apply_two_thirds(s.u);
  }
}

/// Classical RK4 for all unknowns. `u_at` overrides u at stage times in
/// director-only mode.
inline State rk4(const State& s0, const LeslieCoefficients& c, double dt, const RhsOptions& opt,
                 const std::function<SpectralField(double)>* u_at = nullptr) {
  const bool with_u = !opt.director_only;
  auto eval = [&](State s) {
    if (u_at) s.u = (*u_at)(s.t);
    return rhs(s, c, opt);
  };
  const Rates k1 = eval(s0);
  State s = detail::combine(s0, 0.5 * dt, k1, with_u);
  s.t = s0.t + 0.5 * dt;
  const Rates k2 = eval(s);
  s = detail::combine(s0, 0.5 * dt, k2, with_u);
  s.t = s0.t + 0.5 * dt;
  const Rates k3 = eval(s);
  s = detail::combine(s0, dt, k3, with_u);
  s.t = s0.t + dt;
  const Rates k4 = eval(s);

  State out = s0;
  out.t = s0.t + dt;
  auto blend = [dt](const SpectralField& y, const SpectralField& a, const SpectralField& b,
                    const SpectralField& cc, const SpectralField& d) {
    SpectralField r = y;
    for (std::size_t i = 0; i < r.data.size(); ++i) {
      r.data[i] += dt / 6.0 * (a.data[i] + 2.0 * b.data[i] + 2.0 * cc.data[i] + d.data[i]);
    }
    return r;
  };
  if (with_u) out.u = blend(s0.u, k1.du, k2.du, k3.du, k4.du);
  if (u_at) out.u = (*u_at)(out.t);
  out.d = blend(s0.d, k1.dd, k2.dd, k3.dd, k4.dd);
  out.w = blend(s0.w, k1.dw, k2.dw, k3.dw, k4.dw);
  return out;
}

/// Lawson integrating-factor RK4: the viscous term on u is integrated exactly
/// through exp(-mu4/2 |k|^2 t); d and w use plain RK4 stages.
inline State ifrk4(const State& s0, const LeslieCoefficients& c, double dt, RhsOptions opt) {
  opt.include_viscous = false;
  const double mu4 = c.mu4;
  auto half = [&](const SpectralField& f) { return heat_factor(f, mu4, 0.5 * dt); };
  auto full = [&](const SpectralField& f) { return heat_factor(f, mu4, dt); };

  const Rates k1 = rhs(s0, c, opt);
  State s = detail::combine(s0, 0.5 * dt, k1, false);
  s.u = half(axpy(s0.u, 0.5 * dt, k1.du));
  s.t = s0.t + 0.5 * dt;
  const Rates k2 = rhs(s, c, opt);
  s = detail::combine(s0, 0.5 * dt, k2, false);
  s.u = axpy(half(s0.u), 0.5 * dt, k2.du);
  const Rates k3 = rhs(s, c, opt);
  s = detail::combine(s0, dt, k3, false);
  s.u = axpy(full(s0.u), dt, half(k3.du));
  s.t = s0.t + dt;
  const Rates k4 = rhs(s, c, opt);

  State out = s0;
  out.t = s0.t + dt;
  SpectralField acc = full(k1.du);
  SpectralField mid = half(k2.du + k3.du);
  out.u = full(s0.u);
  for (std::size_t i = 0; i < out.u.data.size(); ++i) {
    out.u.data[i] += dt / 6.0 * (acc.data[i] + 2.0 * mid.data[i] + k4.du.data[i]);
  }
  auto blend = [dt](const SpectralField& y, const SpectralField& a, const SpectralField& b,
                    const SpectralField& cc, const SpectralField& d) {
    SpectralField r = y;
    for (std::size_t i = 0; i < r.data.size(); ++i) {
      r.data[i] += dt / 6.0 * (a.data[i] + 2.0 * b.data[i] + 2.0 * cc.data[i] + d.data[i]);
    }
    return r;
  };
  out.d = blend(s0.d, k1.dd, k2.dd, k3.dd, k4.dd);
  out.w = blend(s0.w, k1.dw, k2.dw, k3.dw, k4.dw);
  return out;
}

inline RhsOptions rhs_options(const SolverConfig& cfg) {
  RhsOptions opt;
  opt.dealias = cfg.dealias;
  opt.drop_gamma_lambda2 = cfg.drop_gamma_lambda2;
  return opt;
}

}  // namespace detail

/// Renormalizes d pointwise to unit length (exploratory long runs only).
inline void renormalize_director(State& s, const Dealias& rule) {
  RealField d = inverse(s.d);
  const int dim = s.d.grid.dim();
  for (std::size_t p = 0; p < s.d.grid.size(); ++p) {
    double n2 = 0.0;
    for (int i = 0; i < dim; ++i) n2 += d.at(i, p) * d.at(i, p);
    const double inv = 1.0 / std::sqrt(n2);
    for (int i = 0; i < dim; ++i) d.at(i, p) *= inv;
  }
  s.d = forward(d);
  if (rule.kind == Dealias::Kind::TwoThirds) apply_two_thirds(s.d);
}

struct PicardReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;
};

State picard_step(const State& s, const LeslieCoefficients& c, const SolverConfig& cfg,
                  PicardReport* report = nullptr);

/// One explicit step (RK4 or IFRK4 per the configuration). Picard
/// configurations are forwarded to picard_step.
inline State step(const State& s, const LeslieCoefficients& c, const SolverConfig& cfg) {
  const Integrator integ = resolve_integrator(s.u.grid, c, cfg);
  State out;
  switch (integ) {
    case Integrator::IFRK4:
      out = detail::ifrk4(s, c, cfg.dt, detail::rhs_options(cfg));
      break;
    case Integrator::Picard:
      return picard_step(s, c, cfg);
    default:
      out = detail::rk4(s, c, cfg.dt, detail::rhs_options(cfg));
      break;
  }
  detail::finish_step(out, cfg.dealias, true);
  check_blow_up(out);
  return out;
}

// ---------------------------------------------------------------------------
// Picard iteration over the decoupled system
// ---------------------------------------------------------------------------

namespace detail {

inline double max_change(const SpectralField& a, const SpectralField& b) {
  return max_norm(a - b);
}

}  // namespace detail

/// One time step by the decoupled iteration: the momentum update for u^{k+1}
/// uses the stress sigma(u^{k+1}, d^k, w^k) and the director update for
/// (d^{k+1}, w^{k+1}) is transported by u^k with A^k, B^k and
/// gamma(u^k, d^{k+1}, w^{k+1}). Each sub-problem is discretized by the
/// trapezoidal rule with its linear part (mu4/2 lap u, lap d, lambda1 w)
/// implicit; implicit nonlinear dependences are resolved by inner fixed-point
/// sweeps. Iteration k = 0 starts from the current state.
inline State picard_step(const State& s, const LeslieCoefficients& c, const SolverConfig& cfg,
                         PicardReport* report) {
  const PicardSettings ps = cfg.picard.value_or(PicardSettings{});
  const Grid& g = s.u.grid;
  const int dim = g.dim();
  const double dt = cfg.dt;
  const double a = 0.5 * dt;
  const Dealias rule = cfg.dealias;

  RhsOptions opt = detail::rhs_options(cfg);
  opt.include_viscous = false;
  // Explicit half of the trapezoidal rule, at the start of the step.
  const Rates start = rhs(s, c, opt);
  // Terms treated implicitly are removed from the explicit part below.
  const SpectralField lap_u0 = (0.5 * c.mu4) * laplacian(s.u);
  const SpectralField dd_lin0 = s.w;
  const SpectralField dw_lin0 = (1.0 / c.rho1) * (laplacian(s.d) + c.lambda1 * s.w);
  const SpectralField nd0 = start.dd - dd_lin0;
  const SpectralField nw0 = start.dw - dw_lin0;

  LeslieCoefficients stress_only = c;  // sigma(v, d^k, w^k) evaluation
  const double ka = 0.5 * c.mu4 * a;

  auto momentum_solve = [&](const State& it) {
    // Explicit pieces of iteration k: -u^k.grad u^k - div(grad d^k . grad d^k).
    ProductSpace space(g, rule);
    Samples smp = sample(space, &it.u, &it.d, nullptr,
                         {.u = true, .grad_u = true, .grad_d = true});
    RealField adv(space.physical_grid(), dim), el(space.physical_grid(), dim * dim);
    for (std::size_t p = 0; p < smp.size; ++p) {
      const Vec3 u = smp.vec(smp.u, p);
      const Mat3 gu = smp.mat(smp.grad_u, p);
      const Mat3 e = point::ericksen(smp.mat(smp.grad_d, p), dim);
      for (int i = 0; i < dim; ++i) {
        double uu = 0.0;
        for (int j = 0; j < dim; ++j) {
          uu += u[j] * gu[i][j];
          el.at(tensor_index(dim, i, j), p) = e[i][j];
        }
        adv.at(i, p) = -uu;
      }
    }
    const SpectralField fixed =
        space.from_physical(adv) - divergence(space.from_physical(el));
    SpectralField rhs_const = s.u + a * lap_u0 + a * start.du;
    SpectralField v = it.u;
    double last = INFINITY;
    const double inner_tol = 1e-3 * ps.tolerance;
    for (int m = 0; m < ps.max_inner_sweeps; ++m) {
      SpectralField forcing = fixed;
      forcing += leslie_stress(v, it.d, it.w, stress_only, rule).div_sigma;
      SpectralField r = rhs_const + a * leray_project(forcing);
      SpectralField next = apply_multiplier(r, [&](std::size_t p) { return 1.0 / (1.0 + ka * g.k2(p)); });
      next = leray_project(next);
      if (rule.kind == Dealias::Kind::TwoThirds) apply_two_thirds(next);
      last = detail::max_change(next, v);
      v = std::move(next);
      if (last <= inner_tol) break;
    }
    return v;
  };

  auto director_solve = [&](const State& it) {
    // Transport by u^k: director-only right-hand side with u := u^k.
    RhsOptions dopt = opt;
    dopt.director_only = true;
    State trial = it;  // u = u^k, (d, w) swept
    const double inner_tol = 1e-3 * ps.tolerance;
    for (int m = 0; m < ps.max_inner_sweeps; ++m) {
      const Rates r = rhs(trial, c, dopt);
      const SpectralField nd = r.dd - trial.w;
      const SpectralField nw = r.dw - (1.0 / c.rho1) * (laplacian(trial.d) + c.lambda1 * trial.w);
      const SpectralField rd = s.d + a * (start.dd + nd);
      const SpectralField rw = s.w + a * (start.dw + nw);
      SpectralField d_new(g, dim), w_new(g, dim);
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double k2 = g.k2(p);
        const double denom = 1.0 - a * c.lambda1 / c.rho1 + a * a * k2 / c.rho1;
        for (int i = 0; i < dim; ++i) {
          const Complex wv = (rw.at(i, p) - (a * k2 / c.rho1) * rd.at(i, p)) / denom;
          w_new.at(i, p) = wv;
          d_new.at(i, p) = rd.at(i, p) + a * wv;
        }
      }
      const double change =
          std::max(detail::max_change(d_new, trial.d), detail::max_change(w_new, trial.w));
      trial.d = std::move(d_new);
      trial.w = std::move(w_new);
      if (change <= inner_tol) break;
    }
    return std::make_pair(trial.d, trial.w);
  };
  (void)nd0;
  (void)nw0;

  State it = s;
  PicardReport rep;
  for (int k = 0; k < ps.max_iters; ++k) {
    State next;
    next.t = s.t + dt;
    next.u = momentum_solve(it);
    auto [d, w] = director_solve(it);
    next.d = std::move(d);
    next.w = std::move(w);
    const double r = std::max({detail::max_change(next.u, it.u), detail::max_change(next.d, it.d),
                               detail::max_change(next.w, it.w)});
    rep.residuals.push_back(r);
    rep.iterations = k + 1;
    it = std::move(next);
    if (!std::isfinite(r)) break;
    if (r < ps.tolerance) {
      rep.converged = true;
      break;
    }
  }
  if (report) *report = rep;
  if (!rep.converged) {
    std::ostringstream os;
    os << "Picard iteration did not converge in " << ps.max_iters << " iterations; residuals:";
    for (double r : rep.residuals) os << ' ' << r;
    fail(ErrorKind::NonConvergence, os.str());
  }
  check_blow_up(it);
  return it;
}

// ---------------------------------------------------------------------------
// Director-only evolution with a supplied velocity
// ---------------------------------------------------------------------------

using VelocitySupplier = std::function<SpectralField(double)>;
using Observer = std::function<void(const State&)>;

/// Evolves (d, w) with RK4 under a given velocity. With `eps`, the sharp
/// cutoff J_eps is applied to the initial data and to every director rate,
/// which keeps the solution inside the range of J_eps. The observer is called
/// on the initial state and every `sample_every` steps.
inline State director_only_run(const VelocitySupplier& u_at, const SpectralField& d0,
                               const SpectralField& w0, std::optional<double> eps,
                               const LeslieCoefficients& c, const SolverConfig& cfg,
                               double t_end, const Observer& observe = {}, int sample_every = 1) {
  require(cfg.dt > 0.0, "director_only_run: dt must be > 0");
  require(!eps || *eps > 0.0, "director_only_run: eps must be > 0");
  State s;
  s.t = 0.0;
  s.u = u_at(0.0);
  s.d = eps ? mollify(d0, *eps) : d0;
  s.w = eps ? mollify(w0, *eps) : w0;
  RhsOptions opt = detail::rhs_options(cfg);
  opt.director_only = true;
  opt.mollify_eps = eps;
  const long steps = std::lround(t_end / cfg.dt);
  if (observe) observe(s);
  for (long n = 0; n < steps; ++n) {
    s = detail::rk4(s, c, cfg.dt, opt, &u_at);
    s.t = (n + 1) * cfg.dt;
    check_blow_up(s);
    if (observe && sample_every > 0 && (n + 1) % sample_every == 0) observe(s);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

inline constexpr int kInitialBand = 3;

/// Random real field with modes 1 <= |k| <= band and a (1 + |k|^2)^-1 amplitude
/// envelope, normalized to unit root-mean-square.
inline SpectralField random_smooth_field(const Grid& g, int ncomp, Rng& rng, int band = kInitialBand) {
  SpectralField f(g, ncomp);
  const double b2 = double(band) * band;
  for (int c = 0; c < ncomp; ++c) {
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double k2 = g.k2(p);
      // Draw for every mode so the stream layout does not depend on the band.
      const double re = rng.symmetric();
      const double im = rng.symmetric();
      if (k2 == 0.0 || k2 > b2 || g.is_nyquist(p)) continue;
      f.at(c, p) = Complex(re, im) / (1.0 + k2);
    }
  }
  // Hermitian symmetrization makes the synthesized field real.
  SpectralField sym = f;
  for (int c = 0; c < ncomp; ++c) {
    for (std::size_t p = 0; p < g.size(); ++p) {
      const auto& k = g.wavevector(p);
      const std::size_t q = g.index_of({-k[0], -k[1], -k[2]});
      sym.at(c, p) = 0.5 * (f.at(c, p) + std::conj(f.at(c, q)));
    }
  }
  const double rms = std::sqrt(l2_norm_sq(sym) / g.volume());
  if (rms > 0.0) sym *= 1.0 / rms;
  return sym;
}

inline constexpr double kMinDirectorNorm = 1e-8;

/// Compatible initial data: div u = 0, |d| = 1 and d.w = 0 pointwise on the
/// grid.
///   "random"   u, the director perturbation and w all scale with amplitude
///   "director" as random but with u = 0
///   "uniform"  d = e_n, u = w = 0
inline State make_initial_data(const std::string& kind, double amplitude, std::uint64_t seed,
                               const Grid& g) {
  if (!(amplitude >= 0.0)) fail(ErrorKind::Precondition, "amplitude must be >= 0");
  if (kind != "random" && kind != "director" && kind != "uniform") {
    fail(ErrorKind::Precondition,
         "unknown initial-data kind '" + kind + "' (valid: random, director, uniform)");
  }
  const int dim = g.dim();
  Rng rng(seed);
  SpectralField u_dir = leray_project(random_smooth_field(g, dim, rng));
  const double u_rms = std::sqrt(l2_norm_sq(u_dir) / g.volume());
  if (u_rms > 0.0) u_dir *= 1.0 / u_rms;
  const SpectralField pert = random_smooth_field(g, dim, rng);
  const SpectralField wraw = random_smooth_field(g, dim, rng);

  const bool uniform = kind == "uniform";
  const double amp = uniform ? 0.0 : amplitude;

  State s;
  s.t = 0.0;
  s.u = (kind == "random" ? amp : 0.0) * u_dir;

  RealField p = inverse(pert);
  RealField q = inverse(wraw);
  RealField d(g, dim), w(g, dim);
  for (std::size_t x = 0; x < g.size(); ++x) {
    Vec3 v{};
    for (int i = 0; i < dim; ++i) v[i] = amp * p.at(i, x);
    v[dim - 1] += 1.0;
    const double nrm = std::sqrt(point::dot(v, v, dim));
    if (nrm < kMinDirectorNorm) {
      fail(ErrorKind::Precondition,
           "initial director perturbation degenerates (|d| < 1e-8); retry with a smaller amplitude");
    }
    for (int i = 0; i < dim; ++i) d.at(i, x) = v[i] / nrm;
    Vec3 dv{};
    for (int i = 0; i < dim; ++i) dv[i] = d.at(i, x);
    Vec3 qv{};
    for (int i = 0; i < dim; ++i) qv[i] = q.at(i, x);
    const double qd = point::dot(qv, dv, dim);
    for (int i = 0; i < dim; ++i) w.at(i, x) = amp * (qv[i] - qd * dv[i]);
  }
  s.d = forward(d);
  s.w = forward(w);
  return s;
}

}  // namespace elh
