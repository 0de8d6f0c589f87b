#include "hiter/harness.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hiter {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string seconds_string(double seconds, bool include_timings) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", include_timings ? seconds : 0.0);
  return buf;
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown report format '" + name +
                              "' (csv | json)");
}

std::string render_report(const BoundReport& report, ReportFormat format,
                          bool include_timings) {
  if (format == ReportFormat::csv) {
    std::string out =
        "check,space,map,schedule,eps,g,bound,empirical,status,seconds,seed\n";
    for (const CheckRow& r : report.rows) {
      out += csv_field(r.check) + ',' + csv_field(r.space) + ',' +
             csv_field(r.map) + ',' + csv_field(r.schedule) + ',' +
             csv_field(r.eps) + ',' + csv_field(r.g) + ',' +
             csv_field(r.bound) + ',' + csv_field(r.empirical) + ',' +
             csv_field(r.status) + ',' +
             seconds_string(r.seconds, include_timings) + ',' +
             std::to_string(r.seed) + '\n';
    }
    return out;
  }
  nlohmann::ordered_json doc;
  doc["all_pass"] = report.all_pass;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const CheckRow& r : report.rows) {
    nlohmann::ordered_json j;
    j["check"] = r.check;
    j["space"] = r.space;
    j["map"] = r.map;
    j["schedule"] = r.schedule;
    j["eps"] = r.eps;
    j["g"] = r.g;
    j["bound"] = r.bound;
    j["empirical"] = r.empirical;
    j["status"] = r.status;
    j["seconds"] = seconds_string(r.seconds, include_timings);
    j["seed"] = r.seed;
    j["witness"] = r.witness;
    doc["rows"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

void write_report(const BoundReport& report, ReportFormat format,
                  const std::string& path, bool include_timings) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot open report file '" + path +
                             "' for writing");
  f << render_report(report, format, include_timings);
  f.flush();
  if (!f)
    throw std::runtime_error("failed writing report file '" + path + "'");
}

BoundReport parse_report_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  BoundReport out;
  for (const auto& j : doc.at("rows")) {
    CheckRow r;
    r.check = j.at("check").get<std::string>();
    r.space = j.at("space").get<std::string>();
    r.map = j.at("map").get<std::string>();
    r.schedule = j.at("schedule").get<std::string>();
    r.eps = j.at("eps").get<std::string>();
    r.g = j.at("g").get<std::string>();
    r.bound = j.at("bound").get<std::string>();
    r.empirical = j.at("empirical").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.seconds = std::stod(j.at("seconds").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.witness = j.value("witness", std::string());
    if (r.status != "pass") out.all_pass = false;
    out.rows.push_back(std::move(r));
  }
  return out;
}

}  // namespace hiter
