#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "dchain/verdict.hpp"

namespace dchain::harness {

using Json = nlohmann::ordered_json;

struct Check {
  std::string suite;
  std::string name;
  std::string system;
  Json params = Json::object();
  Verdict verdict = Verdict::pass;
  std::string detail;
  Json witness = Json::object();
};

struct Report {
  std::string scenario;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  Json series = Json::object();  // name -> list of rows
  Json timing = Json::object();

  void add(Check c) { checks.push_back(std::move(c)); }
  void add_series(const std::string& name, Json row);
  std::size_t count(Verdict v) const;
  int exit_code() const;
};

inline constexpr const char* kVersion = "0.3.0";

Json to_json(const Report& r);
Report from_json(const Json& j);
std::string checks_csv(const Report& r);
std::string series_csv(const Report& r);
std::string text_summary(const Report& r);
// Writes report.json / checks.csv / series.csv / summary.txt as selected.
std::vector<std::string> emit_report(const Report& r, const std::string& dir, const std::vector<std::string>& formats);

}  // namespace dchain::harness
