#include "dwkb/report.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "dwkb/errors.hpp"

namespace dwkb {

bool SweepReport::overall_pass() const {
  for (const auto& cell : cells)
    if (!cell.pass) return false;
  return true;
}

namespace {

std::string csv_quote(const std::string& field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void emit_csv(const SweepReport& report, std::ostream& out) {
  out << "suite,h,metric,value\n";
  auto row = [&](const std::string& suite, double h, const std::string& metric, double value) {
    out << csv_quote(suite) << ',' << format_double(h) << ',' << csv_quote(metric) << ','
        << format_double(value) << "\n";
  };
  for (const auto& cell : report.cells) {
    row(cell.suite, cell.h, "max_rel_error", cell.max_rel_error);
    row(cell.suite, cell.h, "mean_error", cell.mean_error);
    row(cell.suite, cell.h, "worst_point_re", cell.worst_point.real());
    row(cell.suite, cell.h, "worst_point_im", cell.worst_point.imag());
    row(cell.suite, cell.h, "runtime_sec", cell.runtime_sec);
    row(cell.suite, cell.h, "pass", cell.pass ? 1.0 : 0.0);
    for (const auto& [key, value] : cell.extra) row(cell.suite, cell.h, key, value);
  }
}

void emit_json(const SweepReport& report, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = report.schema_version;
  doc["timestamp"] = report.timestamp;
  doc["config"] = {{"potential", report.potential},
                   {"energy_re", report.energy.real()},
                   {"energy_im", report.energy.imag()},
                   {"d_x", report.d_x},
                   {"d_y", report.d_y},
                   {"h_list", report.h_list}};
  doc["suites"] = nlohmann::ordered_json::array();
  for (const auto& cell : report.cells) {
    nlohmann::ordered_json c;
    c["suite"] = cell.suite;
    c["h"] = cell.h;
    c["max_rel_error"] = cell.max_rel_error;
    c["mean_error"] = cell.mean_error;
    c["worst_point_re"] = cell.worst_point.real();
    c["worst_point_im"] = cell.worst_point.imag();
    c["runtime_sec"] = cell.runtime_sec;
    c["pass"] = cell.pass;
    if (!cell.extra.empty()) c["extra"] = cell.extra;
    if (!cell.error.empty()) c["error"] = cell.error;
    doc["suites"].push_back(std::move(c));
  }
  doc["overall_pass"] = report.overall_pass();
  out << doc.dump(2) << "\n";
}

void emit(const SweepReport& report, ReportFormat format, const std::string& destination) {
  auto write = [&](std::ostream& os) {
    if (format == ReportFormat::csv)
      emit_csv(report, os);
    else
      emit_json(report, os);
  };
  if (destination.empty() || destination == "-") {
    write(std::cout);
    if (!std::cout) raise(errc::io_error, "failed writing report to stdout");
    return;
  }
  std::ofstream file(destination);
  if (!file) raise(errc::io_error, "cannot open output file: " + destination);
  write(file);
  file.flush();
  if (!file) raise(errc::io_error, "failed writing report to " + destination);
}

}  // namespace dwkb
