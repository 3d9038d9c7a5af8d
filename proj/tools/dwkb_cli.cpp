// Command-line harness: configures a spectral problem, runs h-sweeps of the
// verification suites, and emits CSV/JSON reports.
//
// Exit codes: 0 all suites pass, 1 suite failure, 2 usage/config error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dwkb/errors.hpp"
#include "dwkb/harness.hpp"
#include "dwkb/report.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) dwkb::raise(dwkb::errc::io_error, "cannot read config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"complex WKB verification harness for the difference Schrodinger equation"};
  app.require_subcommand(1);

  std::string config_path, out_path = "-", format = "json";
  int jobs = 1;
  bool verbose = false;

  CLI::App* run_cmd = app.add_subcommand("run", "run the configured sweep and emit a report");
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("--format", format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_option("--out", out_path, "output destination ('-' for stdout)");
  run_cmd->add_option("--jobs", jobs, "parallel sweep width")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--verbose", verbose, "per-cell progress on stderr");

  CLI::App* check_cmd = app.add_subcommand("check-config", "parse and validate a config");
  check_cmd->add_option("config", config_path, "config file")->required();

  app.add_subcommand("list-suites", "list the available verification suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("list-suites")) {
      for (const auto& [suite, name] : dwkb::suite_catalog()) std::cout << name << "\n";
      return 0;
    }
    if (app.got_subcommand("check-config")) {
      dwkb::SweepConfig config = dwkb::parse_config(read_file(config_path));
      std::cout << "config ok: potential " << config.potential_expr << ", "
                << config.h_list.size() << " h values, " << config.suites.size()
                << " suites, regular strip (min |Im p| = " << config.regularity.min_abs_im_p
                << ")\n";
      return 0;
    }
    dwkb::SweepConfig config = dwkb::parse_config(read_file(config_path));
    dwkb::SweepReport report = dwkb::run(config, jobs, verbose);
    dwkb::ReportFormat fmt = format == "csv" ? dwkb::ReportFormat::csv : dwkb::ReportFormat::json;
    dwkb::emit(report, fmt, out_path);
    return report.overall_pass() ? 0 : 1;
  } catch (const dwkb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
