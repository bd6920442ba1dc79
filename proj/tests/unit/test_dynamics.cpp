#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace elh;

namespace {

State shear_state(const Grid& g) {
  State s;
  s.u = oracle::spectral(g, 2, [](int c, const Vec3& x) { return c == 0 ? std::sin(x[1]) : 0.0; });
  s.d = oracle::spectral(g, 2, [](int c, const Vec3&) { return c == 0 ? 1.0 : 0.0; });
  s.w = SpectralField(g, 2);
  return s;
}

double state_distance(const State& a, const State& b) {
  return std::max({max_norm(a.u - b.u), max_norm(a.d - b.d), max_norm(a.w - b.w)});
}

State run(State s, const LeslieCoefficients& c, const SolverConfig& cfg, int steps) {
  for (int i = 0; i < steps; ++i) s = step(s, c, cfg);
  return s;
}

SolverConfig solver(double dt, Integrator integ) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.integrator = integ;
  return cfg;
}

}  // namespace

TEST(Rhs, ShearFlowDecaysByViscosityOnly) {
  Grid g(2, 16);
  const State s = shear_state(g);
  const auto c = preset("wave_map");  // mu4 = 1
  const Rates r = rhs(s, c);
  const auto du = inverse(r.du);
  for (std::size_t p = 0; p < g.size(); ++p) {
    EXPECT_NEAR(du.at(0, p), -0.5 * std::sin(g.point(p)[1]), 1e-14);
    EXPECT_NEAR(du.at(1, p), 0.0, 1e-14);
  }
  EXPECT_LT(oracle::max_abs(r.dd), 1e-15);
  EXPECT_LT(oracle::max_abs(r.dw), 1e-15);
}

TEST(Rhs, DirectorRatesForSimpleStates) {
  // u = 0, w = 0, d = (cos x, sin x): |grad d|^2 = 1, lap d = -d, so
  // rho1 dw = gamma d + lap d = d - d = 0 and dd = w = 0.
  Grid g(2, 16);
  State s;
  s.u = SpectralField(g, 2);
  s.w = SpectralField(g, 2);
  s.d = oracle::spectral(g, 2, [](int c, const Vec3& x) { return c == 0 ? std::cos(x[0]) : std::sin(x[0]); });
  const auto c = preset("damped_default");
  RhsOptions opt;
  opt.dealias = Dealias::padded(3);
  const Rates r = rhs(s, c, opt);
  EXPECT_LT(oracle::max_abs(r.dd), 1e-15);
  EXPECT_LT(oracle::max_abs(r.dw), 1e-14);
  // div(grad d . grad d) is the gradient of a constant here after projection.
  EXPECT_LT(oracle::max_abs(r.du), 1e-14);
}

TEST(Rhs, VelocityRateIsDivergenceFree) {
  Grid g(3, 8);
  const State s = oracle::random_state(g, 3, 2);
  const Rates r = rhs(s, LeslieCoefficients::from_independent(0.5, 1, 0.3, 0.8, -1, 2));
  EXPECT_LT(oracle::max_abs(divergence(r.du)), 1e-13);
}

TEST(Rhs, DirectorOnlyLeavesVelocityRateEmpty) {
  Grid g(2, 8);
  const State s = oracle::random_state(g, 3, 2);
  RhsOptions opt;
  opt.director_only = true;
  const Rates r = rhs(s, preset("wave_map"), opt);
  EXPECT_TRUE(r.du.data.empty());
}

TEST(Rhs, RejectsBadInputs) {
  Grid g(2, 8);
  State s = oracle::random_state(g, 3, 2);
  auto c = preset("damped_default");
  c.rho1 = 0.0;
  EXPECT_THROW(rhs(s, c), Error);
  s.w = SpectralField(g, 1);
  EXPECT_THROW(rhs(s, preset("damped_default")), Error);
}

TEST(StepLimits, MatchClosedForms) {
  Grid g(2, 16);
  const auto c = LeslieCoefficients::from_independent(0, 3, 0, 0, -1, 4);
  const auto lim = step_limits(g, c, Dealias::two_thirds(), 2.0);
  // two-thirds cutoff 5 -> |k|^2 <= 50
  EXPECT_DOUBLE_EQ(lim.advective, g.spacing() / 2.0);
  EXPECT_DOUBLE_EQ(lim.viscous, 2.8 / (1.5 * 50));
  EXPECT_DOUBLE_EQ(lim.wave, 2.8 * 2.0 / std::sqrt(50.0));
  const auto none = step_limits(g, c, Dealias::none(), 0.0);
  EXPECT_TRUE(std::isinf(none.advective));
  EXPECT_DOUBLE_EQ(none.viscous, 2.8 / (1.5 * 98));
}

TEST(StepLimits, AutoPicksIntegratingFactorForStiffViscosity) {
  Grid g(2, 64);  // |k|^2 <= 882
  const auto c = preset("damped_default");
  // mu4 |k|^2 dt = 2 * 882 * dt crosses 2 at dt = 1.13e-3.
  EXPECT_EQ(resolve_integrator(g, c, solver(2e-3, Integrator::Auto)), Integrator::IFRK4);
  EXPECT_EQ(resolve_integrator(g, c, solver(1e-3, Integrator::Auto)), Integrator::RK4);
  EXPECT_EQ(resolve_integrator(g, c, solver(1e-3, Integrator::RK4)), Integrator::RK4);
}

TEST(StepLimits, ValidationNamesTheViolatedLimit) {
  Grid g(2, 64);
  const auto c = preset("damped_default");
  auto expect_cfl = [&](const SolverConfig& cfg, double speed, const std::string& word) {
    try {
      validate_time_step(g, c, cfg, speed);
      FAIL() << "expected a CFL error mentioning " << word;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Cfl);
      EXPECT_NE(std::string(e.what()).find(word), std::string::npos) << e.what();
    }
  };
  expect_cfl(solver(0.0, Integrator::RK4), 0.0, "dt");
  expect_cfl(solver(-1e-3, Integrator::RK4), 0.0, "dt");
  expect_cfl(solver(4e-3, Integrator::RK4), 0.0, "viscous");
  expect_cfl(solver(1e-2, Integrator::IFRK4), 100.0, "advective");
  expect_cfl(solver(0.2, Integrator::IFRK4), 0.0, "wave");
  auto bad_safety = solver(1e-4, Integrator::RK4);
  bad_safety.cfl_safety = 1.5;
  expect_cfl(bad_safety, 0.0, "cfl_safety");
  EXPECT_NO_THROW(validate_time_step(g, c, solver(1e-3, Integrator::IFRK4), 1.0));
}

TEST(Step, IntegratingFactorIsExactForShearFlow) {
  Grid g(2, 16);
  const auto c = preset("wave_map");
  State s = run(shear_state(g), c, solver(0.05, Integrator::IFRK4), 20);
  EXPECT_NEAR(s.t, 1.0, 1e-12);
  const auto u = inverse(s.u);
  for (std::size_t p = 0; p < g.size(); ++p) {
    EXPECT_NEAR(u.at(0, p), std::exp(-0.5) * std::sin(g.point(p)[1]), 1e-14);
  }
}

TEST(Step, Rk4IsFourthOrder) {
  Grid g(2, 16);
  const auto c = preset("damped_default");
  const State s0 = make_initial_data("random", 0.1, 4, g);
  const State ref = run(s0, c, solver(0.1 / 64, Integrator::RK4), 64);
  const double e1 = state_distance(run(s0, c, solver(0.1 / 8, Integrator::RK4), 8), ref);
  const double e2 = state_distance(run(s0, c, solver(0.1 / 16, Integrator::RK4), 16), ref);
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Step, IntegratingFactorConvergesToRk4) {
  Grid g(2, 16);
  const auto c = preset("damped_default");
  const State s0 = make_initial_data("random", 0.1, 4, g);
  const State a = run(s0, c, solver(1e-3, Integrator::RK4), 20);
  const State b = run(s0, c, solver(1e-3, Integrator::IFRK4), 20);
  EXPECT_LT(state_distance(a, b), 1e-9);
}

TEST(Step, VelocityStaysSolenoidalAndTruncated) {
  Grid g(2, 16);
  const State s = run(make_initial_data("random", 0.2, 5, g), preset("damped_default"),
                      solver(1e-3, Integrator::RK4), 5);
  EXPECT_LT(oracle::max_abs(divergence(s.u)), 1e-15);
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!in_two_thirds_band(g, p)) {
      EXPECT_EQ(std::abs(s.u.at(0, p)), 0.0);
    }
  }
}

TEST(Step, AntiDampingBlowsUp) {
  Grid g(2, 16);
  const auto c = LeslieCoefficients::from_independent(0, 1, 0, 0, 50, 1);
  State s = make_initial_data("random", 0.1, 6, g);
  try {
    for (int i = 0; i < 2000; ++i) s = step(s, c, solver(1e-3, Integrator::RK4));
    FAIL() << "expected blow-up";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BlowUp);
  }
}

TEST(Step, BlowUpDetection) {
  Grid g(2, 8);
  State s = make_initial_data("uniform", 0, 1, g);
  EXPECT_NO_THROW(check_blow_up(s));
  s.w.at(0, 1) = Complex(2e8, 0);
  EXPECT_THROW(check_blow_up(s), Error);
  s.w.at(0, 1) = Complex(std::numeric_limits<double>::infinity(), 0);
  try {
    check_blow_up(s);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BlowUp);
    EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos);
  }
}

TEST(Step, RenormalizeRestoresUnitLength) {
  Grid g(2, 16);
  State s = oracle::random_state(g, 8, 2, 0.3);
  renormalize_director(s, Dealias::none());
  EXPECT_LT(constraint_monitor(s.d, s.w).h_max, 1e-2);
  // Pointwise normalization before the transform is exact at the samples up
  // to the discarded Nyquist content.
  auto d = inverse(s.d);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double r = std::hypot(d.at(0, p), d.at(1, p));
    EXPECT_GT(r, 0.98);
    EXPECT_LT(r, 1.02);
  }
}

TEST(Picard, ConvergesGeometricallyAndMatchesRk4) {
  Grid g(2, 16);
  const auto c = preset("damped_default");
  const State s0 = make_initial_data("random", 0.1, 9, g);
  SolverConfig cfg = solver(1e-3, Integrator::Picard);
  cfg.picard = PicardSettings{};
  PicardReport rep;
  const State p1 = picard_step(s0, c, cfg, &rep);
  ASSERT_TRUE(rep.converged);
  ASSERT_GE(rep.residuals.size(), 3u);
  for (std::size_t k = 1; k + 1 < rep.residuals.size(); ++k) {
    EXPECT_LE(rep.residuals[k] / rep.residuals[k - 1], 0.5) << "iteration " << k;
  }
  EXPECT_LT(oracle::max_abs(divergence(p1.u)), 1e-15);
  EXPECT_NEAR(p1.t, 1e-3, 1e-15);

  State a = s0, b = s0;
  for (int i = 0; i < 10; ++i) {
    a = picard_step(a, c, cfg);
    b = step(b, c, solver(1e-3, Integrator::RK4));
  }
  EXPECT_LT(state_distance(a, b), 5 * 1e-6);
}

TEST(Picard, ReportsNonConvergenceWithHistory) {
  Grid g(2, 16);
  const State s0 = make_initial_data("random", 0.1, 9, g);
  SolverConfig cfg = solver(1e-3, Integrator::Picard);
  cfg.picard = PicardSettings{.max_iters = 2, .tolerance = 1e-30};
  try {
    picard_step(s0, preset("damped_default"), cfg);
    FAIL() << "expected non-convergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
    EXPECT_NE(std::string(e.what()).find("residuals:"), std::string::npos);
  }
}

TEST(Picard, StepDispatchesToPicard) {
  Grid g(2, 16);
  const State s0 = make_initial_data("random", 0.1, 9, g);
  SolverConfig cfg = solver(1e-3, Integrator::Picard);
  cfg.picard = PicardSettings{};
  const auto c = preset("damped_default");
  EXPECT_LT(state_distance(step(s0, c, cfg), picard_step(s0, c, cfg)), 1e-300);
}

TEST(DirectorOnly, WaveMapConservesEnergy) {
  Grid g(2, 32);
  const auto c = preset("wave_map");
  const State s0 = make_initial_data("director", 0.05, 12, g);
  const double e0 = basic_energy(s0, c);
  const SpectralField zero(g, 2);
  int calls = 0;
  const State s = director_only_run([&](double) { return zero; }, s0.d, s0.w, std::nullopt, c,
                                    solver(1e-3, Integrator::RK4), 0.1,
                                    [&](const State&) { ++calls; }, 10);
  EXPECT_EQ(calls, 11);
  EXPECT_NEAR(s.t, 0.1, 1e-12);
  EXPECT_LT(std::abs(basic_energy(s, c) - e0) / e0, 1e-8);
  EXPECT_LT(constraint_monitor(s.d, s.w).h_max, 1e-8);
}

TEST(DirectorOnly, MollifiedRunStaysInCutoffRange) {
  Grid g(2, 32);
  const State s0 = make_initial_data("director", 0.2, 12, g);
  const SpectralField zero(g, 2);
  const double eps = 0.25;
  const State s = director_only_run([&](double) { return zero; }, s0.d, s0.w, eps, preset("wave_map"),
                                    solver(1e-3, Integrator::RK4), 0.05);
  EXPECT_LT(oracle::max_abs_diff(mollify(s.d, eps), s.d), 1e-300);
  EXPECT_LT(oracle::max_abs_diff(mollify(s.w, eps), s.w), 1e-300);
}

TEST(DirectorOnly, RejectsBadParameters) {
  Grid g(2, 8);
  const State s0 = make_initial_data("director", 0.2, 1, g);
  auto u = [&](double) { return SpectralField(g, 2); };
  EXPECT_THROW(director_only_run(u, s0.d, s0.w, 0.0, preset("wave_map"), solver(1e-3, Integrator::RK4), 0.1),
               Error);
  EXPECT_THROW(director_only_run(u, s0.d, s0.w, std::nullopt, preset("wave_map"),
                                 solver(0.0, Integrator::RK4), 0.1),
               Error);
}

TEST(InitialData, RandomFieldIsRealBandLimitedAndNormalized) {
  Grid g(3, 16);
  Rng rng(21);
  const auto f = random_smooth_field(g, 2, rng, 3);
  EXPECT_NEAR(l2_norm_sq(f) / g.volume(), 1.0, 1e-12);
  for (int c = 0; c < 2; ++c)
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (g.k2(p) == 0.0 || g.k2(p) > 9.0) {
        EXPECT_EQ(std::abs(f.at(c, p)), 0.0);
      }
      if (!g.is_nyquist(p)) {
        EXPECT_LT(std::abs(f.at(c, p) - std::conj(f.at(c, g.negated(p)))), 1e-16);
      }
    }
}

TEST(InitialData, StreamLayoutIndependentOfBand) {
  // A narrower band keeps the same draws on the surviving modes.
  Grid g(2, 16);
  Rng r2(5), r3(5);
  const auto a = random_smooth_field(g, 1, r2, 2);
  const auto b = random_smooth_field(g, 1, r3, 3);
  std::size_t p = g.index_of({1, 1, 0});
  std::size_t q = g.index_of({2, 0, 0});
  EXPECT_NEAR(std::abs(a.at(0, p) / a.at(0, q) - b.at(0, p) / b.at(0, q)), 0.0, 1e-14);
  EXPECT_EQ(r2.uniform(), r3.uniform());
}

TEST(InitialData, CompatibilityConditions) {
  // Normalization happens at the samples; only the discarded Nyquist
  // content perturbs |d| = 1, which is negligible at small amplitude.
  Grid g(2, 64);
  const State s = make_initial_data("random", 0.05, 17, g);
  EXPECT_LT(oracle::max_abs(divergence(s.u)), 1e-15);
  EXPECT_NEAR(std::sqrt(l2_norm_sq(s.u) / g.volume()), 0.05, 1e-12);
  const auto drift = constraint_monitor(s.d, s.w);
  EXPECT_LT(drift.h_max, 1e-8);
  EXPECT_LT(drift.tangency_max, 1e-8);

  const State dir = make_initial_data("director", 0.05, 17, g);
  EXPECT_EQ(oracle::max_abs(dir.u), 0.0);
  EXPECT_EQ(oracle::max_abs_diff(dir.d, s.d), 0.0);

  const State uni = make_initial_data("uniform", 0.05, 17, g);
  EXPECT_EQ(oracle::max_abs(uni.w), 0.0);
  EXPECT_EQ(constraint_monitor(uni.d, uni.w).h_max, 0.0);
}

TEST(InitialData, SameSeedSameData) {
  Grid g(3, 8);
  const State a = make_initial_data("random", 0.2, 99, g);
  const State b = make_initial_data("random", 0.2, 99, g);
  const State c = make_initial_data("random", 0.2, 100, g);
  EXPECT_EQ(a.u.data, b.u.data);
  EXPECT_EQ(a.d.data, b.d.data);
  EXPECT_EQ(a.w.data, b.w.data);
  EXPECT_NE(a.d.data, c.d.data);
}

TEST(InitialData, RejectsBadArguments) {
  Grid g(2, 8);
  EXPECT_THROW(make_initial_data("swirl", 0.1, 1, g), Error);
  EXPECT_THROW(make_initial_data("random", -0.1, 1, g), Error);
}
