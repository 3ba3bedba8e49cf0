#include "parafee/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace parafee {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void csv_row(std::ostringstream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
  out << "\r\n";
}

}  // namespace

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

void Report::check(std::string name, bool pass, std::string detail) {
  checks.push_back(CheckLine{std::move(name), pass, std::move(detail)});
}

void Report::merge(const Report& other, const std::string& prefix) {
  for (auto t : other.tables) {
    t.title = prefix + t.title;
    tables.push_back(std::move(t));
  }
  for (auto c : other.checks) {
    c.name = prefix + c.name;
    checks.push_back(std::move(c));
  }
  for (auto t : other.timings) {
    t.first = prefix + t.first;
    timings.push_back(std::move(t));
  }
}

std::string render_csv(const Report& report) {
  std::ostringstream out;
  bool first = true;
  for (const auto& t : report.tables) {
    if (!first) out << "\r\n";
    first = false;
    csv_row(out, t.header);
    for (const auto& row : t.rows) csv_row(out, row);
  }
  return out.str();
}

std::string result_section(const Report& report) {
  std::ostringstream out;
  out << "command: " << report.command << "\n";
  if (!report.scenario.empty()) out << "scenario: " << report.scenario << "\n";
  if (!report.scenario_hash.empty()) out << "scenario_hash: " << report.scenario_hash << "\n";
  for (const auto& t : report.tables) {
    out << "\n[" << t.title << "]\n";
    std::vector<std::size_t> width(t.header.size(), 0);
    for (std::size_t i = 0; i < t.header.size(); ++i) width[i] = t.header[i].size();
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    auto line = [&](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(i < width.size() ? width[i] : 0))
            << row[i];
      }
      out << "\n";
    };
    line(t.header);
    for (const auto& row : t.rows) line(row);
  }
  if (!report.checks.empty()) {
    out << "\n[checks]\n";
    for (const auto& c : report.checks) {
      out << (c.pass ? "PASS  " : "FAIL  ") << c.name;
      if (!c.detail.empty()) out << "  (" << c.detail << ")";
      out << "\n";
    }
    const auto passed = std::count_if(report.checks.begin(), report.checks.end(), [](const auto& c) { return c.pass; });
    out << passed << "/" << report.checks.size() << " checks passed\n";
  }
  return out.str();
}

std::string render_text(const Report& report, bool timings) {
  std::ostringstream out;
  out << result_section(report);
  if (timings && !report.timings.empty()) {
    out << "\n[timings]\n";
    for (const auto& [name, seconds] : report.timings) {
      out << name << ": " << std::fixed << std::setprecision(4) << seconds << " s\n";
    }
  }
  return out.str();
}

nlohmann::json report_json(const Report& report, bool timings) {
  nlohmann::json j;
  j["command"] = report.command;
  j["scenario"] = report.scenario;
  j["scenario_hash"] = report.scenario_hash;
  j["tables"] = nlohmann::json::array();
  for (const auto& t : report.tables) {
    j["tables"].push_back({{"title", t.title}, {"header", t.header}, {"rows", t.rows}});
  }
  j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks) {
    j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  j["ok"] = report.ok();
  if (timings) {
    j["timings"] = nlohmann::json::object();
    for (const auto& [name, seconds] : report.timings) j["timings"][name] = seconds;
  }
  return j;
}

bool report_hash_matches(const nlohmann::json& report, const std::string& expected_hash) {
  return report.contains("scenario_hash") && report["scenario_hash"].is_string() &&
         report["scenario_hash"].get<std::string>() == expected_hash;
}

}  // namespace parafee
