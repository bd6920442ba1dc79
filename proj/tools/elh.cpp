// Command-line front end: simulate, check-coeffs, identities, sweep, report.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "elh/elh.hpp"

namespace {

elh::RawConfig load_raw(const std::string& path) {
  return elh::parse_raw_config(elh::read_text_file(path));
}

int report_error(const elh::Error& e) {
  std::cerr << e.what() << "\n";
  switch (e.kind()) {
    case elh::ErrorKind::Config:
    case elh::ErrorKind::Cfl:
      return elh::kExitConfig;
    case elh::ErrorKind::BlowUp:
    case elh::ErrorKind::NonConvergence:
      return elh::kExitAborted;
    default:
      return elh::kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral solver for the inertial Ericksen-Leslie system"};
  app.require_subcommand(1);

  std::string config_path, csv_path, axis, values;
  bool assert_thresholds = false;

  auto* simulate = app.add_subcommand("simulate", "Run a simulation and write diagnostics");
  simulate->add_option("config", config_path, "Configuration file")->required();
  auto* check = app.add_subcommand("check-coeffs", "Report coefficient relations and class");
  check->add_option("config", config_path, "Configuration file")->required();
  auto* ident = app.add_subcommand("identities", "Evaluate the stress/dissipation identities");
  ident->add_option("config", config_path, "Configuration file")->required();
  auto* sweep = app.add_subcommand("sweep", "Run simulations over one parameter axis");
  sweep->add_option("config", config_path, "Configuration file")->required();
  sweep->add_option("--axis", axis, "Parameter as section.key")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  auto* report = app.add_subcommand("report", "Summarize a diagnostics CSV");
  report->add_option("csv", csv_path, "Diagnostics CSV")->required();
  report->add_flag("--assert", assert_thresholds, "Exit 4 when a threshold is violated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : elh::kExitConfig;
  }

  try {
    if (*simulate) {
      const elh::RunConfig cfg = elh::build_config(load_raw(config_path));
      const elh::RunOutcome out = elh::run_simulation(cfg, &std::cout);
      return out.exit_code;
    }
    if (*check) {
      const elh::RunConfig cfg = elh::build_config(load_raw(config_path), false);
      std::cout << elh::check_coefficients_report(cfg);
      return elh::kExitOk;
    }
    if (*ident) {
      const elh::RunConfig cfg = elh::build_config(load_raw(config_path), false);
      const elh::IdentityReport r = elh::run_identities(cfg);
      std::cout << elh::format_identities(r);
      return r.all_pass() ? elh::kExitOk : elh::kExitThreshold;
    }
    if (*sweep) {
      std::vector<std::string> list;
      std::size_t start = 0;
      while (true) {
        const auto comma = values.find(',', start);
        list.push_back(values.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      const auto points = elh::run_sweep(load_raw(config_path), axis, list);
      std::cout << elh::format_sweep(axis, points);
      return elh::kExitOk;
    }
    if (*report) {
      const elh::CsvTable t = elh::parse_csv(elh::read_text_file(csv_path));
      const elh::RunSummary s = elh::summarize(t.rows);
      std::cout << elh::format_summary(s);
      if (assert_thresholds) {
        const auto failures = elh::check_thresholds(s);
        for (const auto& f : failures) std::cout << "FAIL: " << f << "\n";
        if (!failures.empty()) return elh::kExitThreshold;
        std::cout << "all thresholds met\n";
      }
      return elh::kExitOk;
    }
  } catch (const elh::Error& e) {
    return report_error(e);
  }
  return elh::kExitOk;
}
