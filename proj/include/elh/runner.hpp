#pragma once

// Subcommand implementations shared by the command-line tool and the tests.
// Exit codes: 0 success, 2 configuration error, 3 run aborted (blow-up or
// Picard non-convergence), 4 threshold failure.

#include <atomic>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "io.hpp"

namespace elh {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitAborted = 3, kExitThreshold = 4 };

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

inline constexpr double kResidualThreshold = 1e-4;
inline constexpr double kDriftThreshold = 1e-6;
inline constexpr double kMonotoneSlack = 1e-8;

struct RunSummary {
  std::size_t samples = 0;
  double t_first = 0.0, t_last = 0.0;
  std::optional<double> max_residual;
  std::optional<double> max_h;
  std::optional<double> max_tangency;
  std::optional<double> energy_first, energy_last;
  /// Largest increase of E_eta between consecutive samples.
  std::optional<double> eta_max_rise;
  std::optional<double> hs_first, hs_last;

  bool eta_non_increasing() const { return !eta_max_rise || *eta_max_rise <= kMonotoneSlack; }
};

inline RunSummary summarize(const std::vector<CsvRow>& rows) {
  RunSummary s;
  s.samples = rows.size();
  if (rows.empty()) return s;
  auto col = [](const char* name) { return csv_column(name); };
  const std::size_t t = col("t"), e = col("E_basic"), res = col("residual"), h = col("h_max"),
                    tan = col("tangency_max"), eta = col("E_eta"), hs = col("E_hs");
  s.t_first = rows.front()[t].value_or(0.0);
  s.t_last = rows.back()[t].value_or(0.0);
  s.energy_first = rows.front()[e];
  s.energy_last = rows.back()[e];
  s.hs_first = rows.front()[hs];
  s.hs_last = rows.back()[hs];
  auto track_max = [](std::optional<double>& m, const std::optional<double>& v) {
    if (v) m = m ? std::max(*m, *v) : *v;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    track_max(s.max_residual, rows[i][res]);
    track_max(s.max_h, rows[i][h]);
    track_max(s.max_tangency, rows[i][tan]);
    if (i > 0 && rows[i][eta] && rows[i - 1][eta]) {
      track_max(s.eta_max_rise, *rows[i][eta] - *rows[i - 1][eta]);
    }
  }
  return s;
}

inline std::string format_summary(const RunSummary& s) {
  auto num = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", *v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "samples: " << s.samples << "\n";
  os << "time range: " << num(s.t_first) << " .. " << num(s.t_last) << "\n";
  os << "basic energy: " << num(s.energy_first) << " -> " << num(s.energy_last) << "\n";
  os << "H^s energy: " << num(s.hs_first) << " -> " << num(s.hs_last) << "\n";
  os << "max relative energy residual: " << num(s.max_residual) << "\n";
  os << "max constraint drift |h|: " << num(s.max_h) << "\n";
  os << "max tangency |d.w|: " << num(s.max_tangency) << "\n";
  os << "modified energy: ";
  if (!s.eta_max_rise) {
    os << "not recorded\n";
  } else {
    os << (s.eta_non_increasing() ? "non-increasing" : "INCREASING") << " (max rise "
       << num(s.eta_max_rise) << ")\n";
  }
  return os.str();
}

/// Threshold checks used by `report --assert`; returns failure messages.
inline std::vector<std::string> check_thresholds(const RunSummary& s) {
  std::vector<std::string> out;
  char buf[160];
  if (s.max_residual && *s.max_residual > kResidualThreshold) {
    std::snprintf(buf, sizeof buf, "energy residual %.3e exceeds %.0e", *s.max_residual,
                  kResidualThreshold);
    out.emplace_back(buf);
  }
  if (s.max_h && *s.max_h > kDriftThreshold) {
    std::snprintf(buf, sizeof buf, "constraint drift %.3e exceeds %.0e", *s.max_h,
                  kDriftThreshold);
    out.emplace_back(buf);
  }
  if (!s.eta_non_increasing()) {
    std::snprintf(buf, sizeof buf, "modified energy rises by %.3e (> %.0e)", *s.eta_max_rise,
                  kMonotoneSlack);
    out.emplace_back(buf);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;  ///< failure description
  std::vector<DiagnosticsRecord> records;
  RunSummary summary;
  State final_state;
  long steps_taken = 0;
};

inline std::vector<std::string> csv_comments(const RunConfig& cfg) {
  const auto& c = cfg.coefficients;
  using detail::format_double;
  std::vector<std::string> out;
  out.push_back("elh simulate");
  out.push_back("rng: " + Rng::describe(cfg.initial.seed));
  out.push_back("grid: dim=" + std::to_string(cfg.dim) + " n=" + std::to_string(cfg.n));
  out.push_back("coefficients: mu1=" + format_double(c.mu1) + " mu2=" + format_double(c.mu2) +
                " mu3=" + format_double(c.mu3) + " mu4=" + format_double(c.mu4) +
                " mu5=" + format_double(c.mu5) + " mu6=" + format_double(c.mu6) +
                " lambda1=" + format_double(c.lambda1) + " lambda2=" + format_double(c.lambda2) +
                " rho1=" + format_double(c.rho1));
  out.push_back("solver: dt=" + format_double(cfg.solver.dt) +
                " integrator=" + to_string(cfg.solver.integrator) +
                " dealias=" + detail::dealias_key(cfg.solver.dealias) +
                " mode=" + (cfg.mode == RunMode::Full ? "full" : "director_only"));
  out.push_back("initial: kind=" + cfg.initial.kind +
                " amplitude=" + format_double(cfg.initial.amplitude));
  return out;
}

/// Initial state of a run, truncated to the retained band of the rule.
inline State initial_state(const RunConfig& cfg) {
  State s = make_initial_data(cfg.initial.kind, cfg.initial.amplitude, cfg.initial.seed,
                              cfg.grid());
  if (cfg.solver.dealias.kind == Dealias::Kind::TwoThirds) {
    apply_two_thirds(s.u);
    apply_two_thirds(s.d);
    apply_two_thirds(s.w);
  }
  if (cfg.mollify_eps) {
    s.d = mollify(s.d, *cfg.mollify_eps);
    s.w = mollify(s.w, *cfg.mollify_eps);
  }
  return s;
}

inline DiagnosticsSettings diagnostics_settings(const RunConfig& cfg) {
  DiagnosticsSettings d;
  d.s = cfg.sobolev_order();
  d.hs = cfg.diagnostics.hs;
  d.eta = resolved_eta(cfg);
  if (d.eta) d.eta0 = eta0(cfg.coefficients, cfg.diagnostics.eta_constant);
  return d;
}

/// Runs a validated configuration to t_end (or the first failure), writing
/// the CSV and snapshots it names. Partial results are kept on failure.
inline RunOutcome run_simulation(const RunConfig& cfg, std::ostream* log = nullptr) {
  RunOutcome out;
  const LeslieCoefficients& c = cfg.coefficients;
  const DiagnosticsSettings dset = diagnostics_settings(cfg);
  State s = initial_state(cfg);
  const long steps = cfg.steps();
  const double dt = cfg.solver.dt;

  RhsOptions dopt = detail::rhs_options(cfg.solver);
  dopt.director_only = true;
  dopt.mollify_eps = cfg.mollify_eps;
  const SpectralField frozen_u = s.u;
  const std::function<SpectralField(double)> u_at = [&frozen_u](double) { return frozen_u; };

  auto record = [&](const State& st) { out.records.push_back(diagnose(st, c, dset)); };
  auto snapshot = [&](const State& st, long n) {
    if (cfg.output.snapshot_every > 0 && n % cfg.output.snapshot_every == 0) {
      write_snapshot(snapshot_path(cfg.output.snapshot, n / cfg.output.snapshot_every), st);
    }
  };

  try {
    validate_time_step(s.u.grid, c, cfg.solver, max_norm(s.u));
    record(s);
    snapshot(s, 0);
    for (long n = 0; n < steps; ++n) {
      if (cfg.mode == RunMode::Full) {
        s = step(s, c, cfg.solver);
      } else {
        s = detail::rk4(s, c, dt, dopt, &u_at);
        check_blow_up(s);
      }
      s.t = static_cast<double>(n + 1) * dt;
      if (cfg.solver.renormalize_every > 0 && (n + 1) % cfg.solver.renormalize_every == 0) {
        renormalize_director(s, cfg.solver.dealias);
      }
      out.steps_taken = n + 1;
      if ((n + 1) % cfg.diagnostics.sample_every == 0) record(s);
      snapshot(s, n + 1);
    }
  } catch (const Error& e) {
    out.exit_code = e.kind() == ErrorKind::Cfl ? kExitConfig : kExitAborted;
    out.message = e.what();
  }
  out.final_state = s;
  fill_energy_residuals(out.records);
  std::vector<CsvRow> rows;
  rows.reserve(out.records.size());
  for (const auto& r : out.records) rows.push_back(to_row(r));
  out.summary = summarize(rows);
  if (!cfg.output.csv.empty()) write_text_file(cfg.output.csv, format_csv(rows, csv_comments(cfg)));
  if (log) {
    if (out.exit_code != kExitOk) {
      *log << "run aborted: " << out.message << "\n";
      if (!rows.empty()) {
        *log << "last valid diagnostics at t=" << detail::format_double(out.records.back().t)
             << ": E_basic=" << detail::format_double(out.records.back().basic_energy)
             << " h_max=" << detail::format_double(out.records.back().drift.h_max) << "\n";
      }
    }
    *log << format_summary(out.summary);
  }
  return out;
}

// ---------------------------------------------------------------------------
// check-coeffs, identities
// ---------------------------------------------------------------------------

inline std::string check_coefficients_report(const RunConfig& cfg) {
  const auto& c = cfg.coefficients;
  using detail::format_double;
  std::ostringstream os;
  os << "mu1=" << format_double(c.mu1) << " mu2=" << format_double(c.mu2)
     << " mu3=" << format_double(c.mu3) << " mu4=" << format_double(c.mu4)
     << " mu5=" << format_double(c.mu5) << " mu6=" << format_double(c.mu6) << "\n";
  os << "lambda1=" << format_double(c.lambda1) << " lambda2=" << format_double(c.lambda2)
     << " rho1=" << format_double(c.rho1);
  if (c.delta) os << " delta=" << format_double(*c.delta);
  os << "\n";
  os << "relations (lambda1 = mu2 - mu3, lambda2 = mu5 - mu6, mu2 + mu3 = mu6 - mu5): "
     << (c.relations_hold(kCoefficientTolerance) ? "hold" : "VIOLATED") << "\n";
  const DissipationClass k = classify(c, std::nullopt, kCoefficientTolerance);
  os << "class: " << describe(k) << "\n";
  if (is_strict_damping(k)) {
    const double e0 = eta0(c, cfg.diagnostics.eta_constant);
    os << "eta0 (C=" << format_double(cfg.diagnostics.eta_constant)
       << "): " << format_double(e0) << "\n";
    os << "C_# = " << format_double(sandwich_lower_constant(c, e0))
       << "  C^# = " << format_double(sandwich_upper_constant(c, e0)) << "\n";
  }
  return os.str();
}

/// Random fields with every mode inside |k| <= band, for the identity checks:
/// u divergence free, d = e_n + perturbation (not normalized), w generic.
inline State band_limited_state(const Grid& g, std::uint64_t seed, int band,
                                double amplitude = 0.3) {
  Rng rng(seed);
  const int dim = g.dim();
  State s;
  s.u = leray_project(random_smooth_field(g, dim, rng, band));
  s.d = amplitude * random_smooth_field(g, dim, rng, band);
  s.d.at(dim - 1, 0) += 1.0;
  s.w = random_smooth_field(g, dim, rng, band);
  return s;
}

inline IdentityReport run_identities(const RunConfig& cfg) {
  const Grid g(cfg.dim, cfg.n);
  const State s = band_limited_state(g, cfg.initial.seed, cfg.n / 8);
  return identity_suite(s.u, s.d, s.w, cfg.coefficients);
}

inline std::string format_identities(const IdentityReport& r) {
  std::ostringstream os;
  char buf[200];
  for (const auto& x : r.results) {
    std::snprintf(buf, sizeof buf, "%-22s lhs=% .12e rhs=% .12e rel=%.3e %s\n", x.name.c_str(),
                  x.lhs, x.rhs, x.error / x.scale, x.pass ? "PASS" : "FAIL");
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepPoint {
  std::string value;
  int exit_code = kExitOk;
  std::string message;
  RunSummary summary;
  std::optional<double> final_eta;
};

inline int sweep_workers() {
  if (const char* env = std::getenv("ELH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

/// Runs one simulation per value of `axis` ("section.key"). Outputs of the
/// base configuration are disabled; per-point failures are recorded and the
/// sweep continues.
inline std::vector<SweepPoint> run_sweep(const RawConfig& base, const std::string& axis,
                                         const std::vector<std::string>& values) {
  const auto dot = axis.find('.');
  if (dot == std::string::npos) fail(ErrorKind::Config, "sweep axis must be section.key");
  const std::string sec = axis.substr(0, dot), key = axis.substr(dot + 1);
  if (!detail::known_key(sec, key)) fail(ErrorKind::Config, "unknown sweep axis " + axis);
  if (values.empty()) fail(ErrorKind::Config, "sweep needs at least one value");

  std::vector<SweepPoint> points(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      SweepPoint& p = points[i];
      p.value = values[i];
      try {
        RawConfig raw = base;
        raw[sec][key] = values[i];
        raw.erase("output");
        const RunConfig cfg = build_config(raw);
        RunOutcome o = run_simulation(cfg);
        p.exit_code = o.exit_code;
        p.message = o.message;
        p.summary = o.summary;
        if (!o.records.empty()) p.final_eta = o.records.back().modified_energy;
      } catch (const Error& e) {
        p.exit_code = e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Cfl ? kExitConfig
                                                                                  : kExitAborted;
        p.message = e.what();
      }
    }
  };
  const int workers = std::min<int>(sweep_workers(), static_cast<int>(values.size()));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  return points;
}

inline std::string format_sweep(const std::string& axis, const std::vector<SweepPoint>& pts) {
  std::ostringstream os;
  os << axis << ",status,E_basic_final,E_eta_final,E_eta_trend,max_h,max_residual\n";
  auto num = [](const std::optional<double>& v) {
    return v ? detail::format_double(*v) : std::string();
  };
  for (const auto& p : pts) {
    const char* status = p.exit_code == kExitOk        ? "ok"
                         : p.exit_code == kExitAborted ? "aborted"
                                                       : "config_error";
    os << p.value << ',' << status << ',' << num(p.summary.energy_last) << ','
       << num(p.final_eta) << ','
       << (p.summary.eta_max_rise ? (p.summary.eta_non_increasing() ? "non-increasing" : "rising")
                                  : "")
       << ',' << num(p.summary.max_h) << ',' << num(p.summary.max_residual) << "\n";
  }
  for (const auto& p : pts) {
    if (p.message.empty()) continue;
    std::string msg = p.message;
    for (auto& ch : msg)
      if (ch == '\n') ch = ' ';
    os << "# " << axis << "=" << p.value << ": " << msg << "\n";
  }
  return os.str();
}

}  // namespace elh
