#pragma once

// Run configuration in a sectioned plain-text format:
//
//   # comment
//   [grid]
//   dim = 2
//   n = 64
//
// Keys are validated against a fixed schema; every problem found is reported
// together.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "diagnostics.hpp"

namespace elh {

struct InitialDataConfig {
  std::string kind = "random";
  double amplitude = 0.05;
  std::uint64_t seed = 1;
  bool operator==(const InitialDataConfig&) const = default;
};

enum class RunMode { Full, DirectorOnly };

struct DiagnosticsConfig {
  std::optional<int> s;  ///< default_sobolev_order(dim) when unset
  /// "auto" (eta0 for strict-damping sets), "none", or a number.
  std::string eta = "auto";
  double eta_constant = 1.0;
  int sample_every = 1;
  bool hs = true;
  bool operator==(const DiagnosticsConfig&) const = default;
};

struct OutputConfig {
  std::string csv;
  std::string snapshot;
  int snapshot_every = 0;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  int dim = 2;
  int n = 64;
  std::string preset;  ///< empty for inline coefficients
  LeslieCoefficients coefficients;
  SolverConfig solver;
  RunMode mode = RunMode::Full;
  std::optional<double> mollify_eps;
  InitialDataConfig initial;
  DiagnosticsConfig diagnostics;
  OutputConfig output;
  double t_end = 1.0;

  Grid grid() const { return Grid(dim, n); }
  int sobolev_order() const { return diagnostics.s.value_or(default_sobolev_order(dim)); }
  long steps() const { return std::lround(t_end / solver.dt); }
};

inline bool operator==(const SolverConfig& a, const SolverConfig& b) {
  return a.dt == b.dt && a.integrator == b.integrator && a.dealias == b.dealias &&
         a.picard == b.picard && a.cfl_safety == b.cfl_safety &&
         a.renormalize_every == b.renormalize_every &&
         a.drop_gamma_lambda2 == b.drop_gamma_lambda2;
}

inline bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.dim == b.dim && a.n == b.n && a.preset == b.preset &&
         a.coefficients == b.coefficients && a.solver == b.solver && a.mode == b.mode &&
         a.mollify_eps == b.mollify_eps && a.initial == b.initial &&
         a.diagnostics == b.diagnostics && a.output == b.output && a.t_end == b.t_end;
}

/// section -> key -> raw value, keeping file order irrelevant.
using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Drops a trailing # comment that is not inside double quotes.
inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct Schema {
  const char* section;
  const char* key;
};

inline constexpr Schema kSchema[] = {
    {"grid", "dim"},
    {"grid", "n"},
    {"coefficients", "preset"},
    {"coefficients", "mu1"},
    {"coefficients", "mu4"},
    {"coefficients", "mu5"},
    {"coefficients", "mu6"},
    {"coefficients", "lambda1"},
    {"coefficients", "rho1"},
    {"coefficients", "delta"},
    {"solver", "dt"},
    {"solver", "integrator"},
    {"solver", "dealias"},
    {"solver", "cfl_safety"},
    {"solver", "picard_max_iters"},
    {"solver", "picard_tol"},
    {"solver", "renormalize_every"},
    {"solver", "mode"},
    {"solver", "mollify_eps"},
    {"solver", "corrupt_gamma"},
    {"initial", "kind"},
    {"initial", "amplitude"},
    {"initial", "seed"},
    {"diagnostics", "s"},
    {"diagnostics", "eta"},
    {"diagnostics", "eta_C"},
    {"diagnostics", "sample_every"},
    {"diagnostics", "hs"},
    {"output", "csv"},
    {"output", "snapshot"},
    {"output", "snapshot_every"},
    {"run", "t_end"},
};

inline bool known_key(const std::string& section, const std::string& key) {
  for (const auto& s : kSchema)
    if (section == s.section && key == s.key) return true;
  return false;
}

/// Typed lookups that record an error instead of throwing.
class Reader {
 public:
  Reader(const RawConfig& raw, std::vector<std::string>& errors) : raw_(raw), errors_(errors) {}

  const std::string* find(const std::string& sec, const std::string& key) const {
    auto s = raw_.find(sec);
    if (s == raw_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  void missing(const std::string& sec, const std::string& key) {
    errors_.push_back("missing required key " + sec + "." + key);
  }

  template <class T>
  std::optional<T> number(const std::string& sec, const std::string& key, bool required = false) {
    const std::string* v = find(sec, key);
    if (!v) {
      if (required) missing(sec, key);
      return std::nullopt;
    }
    T out{};
    const char* b = v->data();
    const char* e = b + v->size();
    auto r = std::from_chars(b, e, out);
    if (r.ec != std::errc() || r.ptr != e) {
      errors_.push_back(sec + "." + key + ": expected " +
                        (std::is_integral_v<T> ? "an integer" : "a number") + ", got '" + *v +
                        "'");
      return std::nullopt;
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(out)) {
        errors_.push_back(sec + "." + key + ": value must be finite");
        return std::nullopt;
      }
    }
    return out;
  }

  std::optional<std::string> text(const std::string& sec, const std::string& key,
                                  bool required = false) {
    const std::string* v = find(sec, key);
    if (!v) {
      if (required) missing(sec, key);
      return std::nullopt;
    }
    return *v;
  }

  std::optional<bool> boolean(const std::string& sec, const std::string& key) {
    const std::string* v = find(sec, key);
    if (!v) return std::nullopt;
    if (*v == "true") return true;
    if (*v == "false") return false;
    errors_.push_back(sec + "." + key + ": expected true or false, got '" + *v + "'");
    return std::nullopt;
  }

 private:
  const RawConfig& raw_;
  std::vector<std::string>& errors_;
};

inline std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "invalid configuration:";
  for (const auto& e : errors) out += "\n  - " + e;
  return out;
}

inline std::optional<Dealias> parse_dealias(const std::string& v) {
  if (v == "two_thirds") return Dealias::two_thirds();
  if (v == "none") return Dealias::none();
  if (v == "padded") return Dealias::padded(3);
  if (v.rfind("padded:", 0) == 0) {
    int degree = 0;
    const char* b = v.data() + 7;
    auto r = std::from_chars(b, v.data() + v.size(), degree);
    if (r.ec == std::errc() && r.ptr == v.data() + v.size() && degree >= 2) {
      return Dealias::padded(degree);
    }
  }
  return std::nullopt;
}

inline std::string dealias_key(const Dealias& d) {
  switch (d.kind) {
    case Dealias::Kind::TwoThirds: return "two_thirds";
    case Dealias::Kind::None: return "none";
    case Dealias::Kind::Padded: return "padded:" + std::to_string(d.degree);
  }
  return "?";
}

}  // namespace detail

/// Splits text into sections and keys. Syntax errors and unknown keys are
/// collected; throws ErrorKind::Config listing all of them.
inline RawConfig parse_raw_config(const std::string& text) {
  RawConfig raw;
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::trim(detail::strip_comment(line));
    if (s.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') {
        errors.push_back(where + "malformed section header '" + s + "'");
        continue;
      }
      section = detail::trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value', got '" + s + "'");
      continue;
    }
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::unquote(detail::trim(s.substr(eq + 1)));
    if (section.empty()) {
      errors.push_back(where + "key '" + key + "' appears before any [section]");
      continue;
    }
    if (!detail::known_key(section, key)) {
      errors.push_back(where + "unknown key " + section + "." + key);
      continue;
    }
    if (raw[section].count(key)) {
      errors.push_back(where + "duplicate key " + section + "." + key);
      continue;
    }
    raw[section][key] = value;
  }
  if (!errors.empty()) fail(ErrorKind::Config, detail::join_errors(errors));
  return raw;
}

/// Builds and validates a RunConfig. With `check_cfl`, the initial data are
/// generated to evaluate the advective limit.
inline RunConfig build_config(const RawConfig& raw, bool check_cfl = true) {
  std::vector<std::string> errors;
  detail::Reader r(raw, errors);
  for (const auto& [sec, keys] : raw)
    for (const auto& [key, v] : keys)
      if (!detail::known_key(sec, key)) errors.push_back("unknown key " + sec + "." + key);

  RunConfig cfg;
  if (auto v = r.number<int>("grid", "dim", true)) cfg.dim = *v;
  if (auto v = r.number<int>("grid", "n", true)) cfg.n = *v;
  if (cfg.dim != 2 && cfg.dim != 3) errors.push_back("grid.dim must be 2 or 3");
  if (cfg.n < 4 || cfg.n % 2 != 0) errors.push_back("grid.n must be even and >= 4");

  // Coefficients: a preset supplies defaults for the six independent values.
  std::optional<LeslieCoefficients> base;
  if (auto p = r.text("coefficients", "preset")) {
    try {
      base = preset(*p);
      cfg.preset = *p;
    } catch (const Error& e) {
      errors.push_back(std::string("coefficients.preset: ") + e.what());
    }
  }
  struct Independent {
    const char* key;
    double value;
  };
  Independent ind[] = {{"mu1", 0}, {"mu4", 0}, {"mu5", 0}, {"mu6", 0}, {"lambda1", 0}, {"rho1", 0}};
  if (base) {
    ind[0].value = base->mu1;
    ind[1].value = base->mu4;
    ind[2].value = base->mu5;
    ind[3].value = base->mu6;
    ind[4].value = base->lambda1;
    ind[5].value = base->rho1;
  }
  const bool has_preset = r.find("coefficients", "preset") != nullptr;
  bool coeffs_ok = !has_preset || base.has_value();
  for (auto& x : ind) {
    if (auto v = r.number<double>("coefficients", x.key, !has_preset)) {
      x.value = *v;
    } else if (!has_preset || r.find("coefficients", x.key)) {
      coeffs_ok = false;
    }
  }
  if (coeffs_ok) {
    if (!(ind[5].value > 0.0)) {
      errors.push_back("coefficients.rho1 must be > 0 (inertia density rho1 > 0 required)");
    } else {
      cfg.coefficients = LeslieCoefficients::from_independent(
          ind[0].value, ind[1].value, ind[2].value, ind[3].value, ind[4].value, ind[5].value);
      if (base) cfg.coefficients.delta = base->delta;
    }
  }
  if (auto v = r.number<double>("coefficients", "delta")) {
    if (!(*v > 0.0 && *v < 1.0)) errors.push_back("coefficients.delta must lie in (0, 1)");
    cfg.coefficients.delta = *v;
  }
  if (coeffs_ok && cfg.coefficients.lambda1 == 0.0 && !cfg.coefficients.delta) {
    errors.push_back("coefficients.delta in (0, 1) is required when lambda1 = 0");
  }

  // Solver.
  if (auto v = r.number<double>("solver", "dt", true)) {
    if (!(*v > 0.0)) errors.push_back("solver.dt must be > 0");
    cfg.solver.dt = *v;
  }
  if (auto v = r.text("solver", "integrator")) {
    if (*v == "rk4") cfg.solver.integrator = Integrator::RK4;
    else if (*v == "ifrk4") cfg.solver.integrator = Integrator::IFRK4;
    else if (*v == "auto") cfg.solver.integrator = Integrator::Auto;
    else if (*v == "picard") cfg.solver.integrator = Integrator::Picard;
    else errors.push_back("solver.integrator must be rk4, ifrk4, auto or picard, got '" + *v + "'");
  }
  if (auto v = r.text("solver", "dealias")) {
    if (auto d = detail::parse_dealias(*v)) cfg.solver.dealias = *d;
    else errors.push_back("solver.dealias must be two_thirds, none, padded or padded:<degree>, got '" + *v + "'");
  }
  if (auto v = r.number<double>("solver", "cfl_safety")) {
    if (!(*v > 0.0 && *v <= 1.0)) errors.push_back("solver.cfl_safety must lie in (0, 1]");
    cfg.solver.cfl_safety = *v;
  }
  {
    auto it = r.number<int>("solver", "picard_max_iters");
    auto tol = r.number<double>("solver", "picard_tol");
    if (it || tol || cfg.solver.integrator == Integrator::Picard) {
      PicardSettings ps;
      if (it) {
        if (*it < 1) errors.push_back("solver.picard_max_iters must be >= 1");
        ps.max_iters = *it;
      }
      if (tol) {
        if (!(*tol > 0.0)) errors.push_back("solver.picard_tol must be > 0");
        ps.tolerance = *tol;
      }
      cfg.solver.picard = ps;
    }
  }
  if (auto v = r.number<int>("solver", "renormalize_every")) {
    if (*v < 0) errors.push_back("solver.renormalize_every must be >= 0");
    cfg.solver.renormalize_every = *v;
  }
  if (auto v = r.text("solver", "mode")) {
    if (*v == "full") cfg.mode = RunMode::Full;
    else if (*v == "director_only") cfg.mode = RunMode::DirectorOnly;
    else errors.push_back("solver.mode must be full or director_only, got '" + *v + "'");
  }
  if (auto v = r.number<double>("solver", "mollify_eps")) {
    if (!(*v > 0.0)) errors.push_back("solver.mollify_eps must be > 0");
    cfg.mollify_eps = *v;
  }
  if (auto v = r.boolean("solver", "corrupt_gamma")) cfg.solver.drop_gamma_lambda2 = *v;
  if (cfg.mollify_eps && cfg.mode != RunMode::DirectorOnly) {
    errors.push_back("solver.mollify_eps requires solver.mode = director_only");
  }
  if (cfg.mode == RunMode::DirectorOnly && cfg.solver.integrator == Integrator::Picard) {
    errors.push_back("solver.integrator = picard is not available in director_only mode");
  }

  // Initial data.
  if (auto v = r.text("initial", "kind")) {
    if (*v != "random" && *v != "director" && *v != "uniform") {
      errors.push_back("initial.kind must be random, director or uniform, got '" + *v + "'");
    }
    cfg.initial.kind = *v;
  }
  if (auto v = r.number<double>("initial", "amplitude")) {
    if (!(*v >= 0.0)) errors.push_back("initial.amplitude must be >= 0");
    cfg.initial.amplitude = *v;
  }
  if (auto v = r.number<std::uint64_t>("initial", "seed")) cfg.initial.seed = *v;

  // Diagnostics.
  if (auto v = r.number<int>("diagnostics", "s")) {
    if (*v < 1) errors.push_back("diagnostics.s must be an integer >= 1");
    cfg.diagnostics.s = *v;
  }
  if (auto v = r.text("diagnostics", "eta")) {
    double x = 0.0;
    auto res = std::from_chars(v->data(), v->data() + v->size(), x);
    const bool numeric = res.ec == std::errc() && res.ptr == v->data() + v->size();
    if (*v != "auto" && *v != "none" && !(numeric && x > 0.0)) {
      errors.push_back("diagnostics.eta must be auto, none or a positive number, got '" + *v + "'");
    }
    cfg.diagnostics.eta = *v;
  }
  if (auto v = r.number<double>("diagnostics", "eta_C")) {
    if (!(*v > 0.0)) errors.push_back("diagnostics.eta_C must be > 0");
    cfg.diagnostics.eta_constant = *v;
  }
  if (auto v = r.number<int>("diagnostics", "sample_every")) {
    if (*v < 1) errors.push_back("diagnostics.sample_every must be >= 1");
    cfg.diagnostics.sample_every = *v;
  }
  if (auto v = r.boolean("diagnostics", "hs")) cfg.diagnostics.hs = *v;

  // Output.
  if (auto v = r.text("output", "csv")) cfg.output.csv = *v;
  if (auto v = r.text("output", "snapshot")) cfg.output.snapshot = *v;
  if (auto v = r.number<int>("output", "snapshot_every")) {
    if (*v < 0) errors.push_back("output.snapshot_every must be >= 0");
    cfg.output.snapshot_every = *v;
  }
  if (cfg.output.snapshot_every > 0 && cfg.output.snapshot.empty()) {
    errors.push_back("output.snapshot_every needs output.snapshot (file prefix)");
  }

  if (auto v = r.number<double>("run", "t_end", true)) {
    if (!(*v > 0.0)) errors.push_back("run.t_end must be > 0");
    cfg.t_end = *v;
  }
  if (errors.empty()) {
    const double steps = cfg.t_end / cfg.solver.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
      errors.push_back("run.t_end must be an integer multiple of solver.dt");
    }
  }

  if (errors.empty() && cfg.diagnostics.eta != "auto" && cfg.diagnostics.eta != "none" &&
      cfg.coefficients.lambda1 < 0.0 && is_strict_damping(classify(cfg.coefficients))) {
    double x = 0.0;
    std::from_chars(cfg.diagnostics.eta.data(),
                    cfg.diagnostics.eta.data() + cfg.diagnostics.eta.size(), x);
    const double bound = eta0(cfg.coefficients, cfg.diagnostics.eta_constant);
    if (x > bound) {
      errors.push_back("diagnostics.eta = " + cfg.diagnostics.eta + " exceeds eta0 = " +
                       detail::format_double(bound));
    }
  }
  if (errors.empty() && check_cfl) {
    try {
      const Grid g = cfg.grid();
      const State s0 =
          make_initial_data(cfg.initial.kind, cfg.initial.amplitude, cfg.initial.seed, g);
      validate_time_step(g, cfg.coefficients, cfg.solver, max_norm(s0.u));
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) fail(ErrorKind::Config, detail::join_errors(errors));
  return cfg;
}

inline RunConfig parse_config(const std::string& text, bool check_cfl = true) {
  return build_config(parse_raw_config(text), check_cfl);
}

/// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& c) {
  using detail::format_double;
  std::ostringstream os;
  os << "[grid]\ndim = " << c.dim << "\nn = " << c.n << "\n\n[coefficients]\n";
  if (!c.preset.empty()) os << "preset = " << c.preset << "\n";
  const auto& k = c.coefficients;
  os << "mu1 = " << format_double(k.mu1) << "\nmu4 = " << format_double(k.mu4)
     << "\nmu5 = " << format_double(k.mu5) << "\nmu6 = " << format_double(k.mu6)
     << "\nlambda1 = " << format_double(k.lambda1) << "\nrho1 = " << format_double(k.rho1)
     << "\n";
  if (k.delta) os << "delta = " << format_double(*k.delta) << "\n";
  const auto& s = c.solver;
  os << "\n[solver]\ndt = " << format_double(s.dt) << "\nintegrator = " << to_string(s.integrator)
     << "\ndealias = " << detail::dealias_key(s.dealias)
     << "\ncfl_safety = " << format_double(s.cfl_safety);
  if (s.picard) {
    os << "\npicard_max_iters = " << s.picard->max_iters
       << "\npicard_tol = " << format_double(s.picard->tolerance);
  }
  os << "\nrenormalize_every = " << s.renormalize_every
     << "\nmode = " << (c.mode == RunMode::Full ? "full" : "director_only");
  if (c.mollify_eps) os << "\nmollify_eps = " << format_double(*c.mollify_eps);
  os << "\ncorrupt_gamma = " << (s.drop_gamma_lambda2 ? "true" : "false") << "\n";
  os << "\n[initial]\nkind = " << c.initial.kind
     << "\namplitude = " << format_double(c.initial.amplitude) << "\nseed = " << c.initial.seed
     << "\n";
  const auto& d = c.diagnostics;
  os << "\n[diagnostics]\n";
  if (d.s) os << "s = " << *d.s << "\n";
  os << "eta = " << d.eta << "\neta_C = " << format_double(d.eta_constant)
     << "\nsample_every = " << d.sample_every << "\nhs = " << (d.hs ? "true" : "false") << "\n";
  os << "\n[output]\n";
  if (!c.output.csv.empty()) os << "csv = \"" << c.output.csv << "\"\n";
  if (!c.output.snapshot.empty()) os << "snapshot = \"" << c.output.snapshot << "\"\n";
  os << "snapshot_every = " << c.output.snapshot_every << "\n";
  os << "\n[run]\nt_end = " << format_double(c.t_end) << "\n";
  return os.str();
}

/// Weight of the modified functional for a run, or nullopt when it is not
/// evaluated.
inline std::optional<double> resolved_eta(const RunConfig& c) {
  if (c.diagnostics.eta == "none") return std::nullopt;
  if (!(c.coefficients.lambda1 < 0.0) || !is_strict_damping(classify(c.coefficients))) {
    return std::nullopt;
  }
  if (c.diagnostics.eta == "auto") return eta0(c.coefficients, c.diagnostics.eta_constant);
  double x = 0.0;
  std::from_chars(c.diagnostics.eta.data(), c.diagnostics.eta.data() + c.diagnostics.eta.size(), x);
  return x;
}

}  // namespace elh
