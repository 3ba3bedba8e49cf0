#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace parafee {

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string command;
  std::string scenario;       // scenario name, empty when none
  std::string scenario_hash;  // empty when none
  std::vector<Table> tables;
  std::vector<CheckLine> checks;
  std::vector<std::pair<std::string, double>> timings;  // seconds

  bool ok() const;
  void check(std::string name, bool pass, std::string detail = {});
  void merge(const Report& other, const std::string& prefix);
};

/// Tables only; RFC 4180 quoting, one blank line between tables.
std::string render_csv(const Report& report);
std::string render_text(const Report& report, bool timings = true);
nlohmann::json report_json(const Report& report, bool timings = true);

/// Deterministic part of a report: command, hash, tables and checks.
std::string result_section(const Report& report);

/// Whether a serialized report belongs to a scenario with `expected_hash`.
bool report_hash_matches(const nlohmann::json& report, const std::string& expected_hash);

}  // namespace parafee
