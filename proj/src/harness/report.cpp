#include "dchain/harness/report.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dchain::harness {

namespace {

Verdict parse_verdict(const std::string& s) {
  for (Verdict v : {Verdict::pass, Verdict::fail, Verdict::hypotheses_not_met, Verdict::resolution_insufficient})
    if (s == to_string(v)) return v;
  throw std::runtime_error("unknown verdict '" + s + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string cell_text(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error(p.string() + ": cannot write");
  out << body;
  if (!out) throw std::runtime_error(p.string() + ": write failed");
}

}  // namespace

void Report::add_series(const std::string& name, Json row) {
  if (!series.contains(name)) series[name] = Json::array();
  series[name].push_back(std::move(row));
}

std::size_t Report::count(Verdict v) const {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.verdict == v;
  return n;
}

int Report::exit_code() const {
  if (count(Verdict::fail)) return 1;
  if (count(Verdict::resolution_insufficient)) return 3;
  return 0;
}

Json to_json(const Report& r) {
  Json j;
  j["provenance"] = {{"scenario", r.scenario}, {"config_hash", r.config_hash}, {"seed", r.seed}, {"version", kVersion}};
  Json summary;
  summary["checks"] = r.checks.size();
  for (Verdict v : {Verdict::pass, Verdict::fail, Verdict::hypotheses_not_met, Verdict::resolution_insufficient})
    summary[to_string(v)] = r.count(v);
  summary["exit_code"] = r.exit_code();
  j["summary"] = summary;
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"suite", c.suite},
                      {"name", c.name},
                      {"system", c.system},
                      {"params", c.params},
                      {"verdict", to_string(c.verdict)},
                      {"detail", c.detail},
                      {"witness", c.witness}});
  j["checks"] = checks;
  j["series"] = r.series;
  j["timing"] = r.timing;
  return j;
}

Report from_json(const Json& j) {
  Report r;
  const auto& p = j.at("provenance");
  r.scenario = p.at("scenario").get<std::string>();
  r.config_hash = p.at("config_hash").get<std::string>();
  r.seed = p.at("seed").get<std::uint64_t>();
  for (const auto& c : j.at("checks"))
    r.add({c.at("suite").get<std::string>(), c.at("name").get<std::string>(), c.at("system").get<std::string>(),
           c.at("params"), parse_verdict(c.at("verdict").get<std::string>()), c.at("detail").get<std::string>(),
           c.at("witness")});
  if (j.contains("series")) r.series = j.at("series");
  if (j.contains("timing")) r.timing = j.at("timing");
  return r;
}

std::string checks_csv(const Report& r) {
  std::ostringstream os;
  os << "suite,name,system,params,verdict,detail\n";
  for (const auto& c : r.checks)
    os << csv_field(c.suite) << ',' << csv_field(c.name) << ',' << csv_field(c.system) << ','
       << csv_field(c.params.dump()) << ',' << to_string(c.verdict) << ',' << csv_field(c.detail) << '\n';
  return os.str();
}

// Long format: one row per series row, columns are the union of keys in first-seen order.
std::string series_csv(const Report& r) {
  std::vector<std::string> cols;
  std::set<std::string> seen;
  for (const auto& [name, rows] : r.series.items())
    for (const auto& row : rows)
      for (const auto& [k, v] : row.items())
        if (seen.insert(k).second) cols.push_back(k);
  std::ostringstream os;
  os << "series";
  for (const auto& c : cols) os << ',' << csv_field(c);
  os << '\n';
  for (const auto& [name, rows] : r.series.items())
    for (const auto& row : rows) {
      os << csv_field(name);
      for (const auto& c : cols) os << ',' << (row.contains(c) ? csv_field(cell_text(row[c])) : "");
      os << '\n';
    }
  return os.str();
}

std::string text_summary(const Report& r) {
  std::ostringstream os;
  os << "scenario " << r.scenario << "  seed " << r.seed << "  config " << r.config_hash << '\n';
  for (const auto& c : r.checks) {
    os << to_string(c.verdict) << "  " << c.suite << '/' << c.name << "  " << c.system;
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
  os << r.checks.size() << " checks: " << r.count(Verdict::pass) << " pass, " << r.count(Verdict::fail) << " fail, "
     << r.count(Verdict::hypotheses_not_met) << " hypotheses-not-met, " << r.count(Verdict::resolution_insufficient)
     << " resolution-insufficient\n";
  return os.str();
}

std::vector<std::string> emit_report(const Report& r, const std::string& dir, const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir + ": " + ec.message());
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& body) {
    const fs::path p = fs::path(dir) / name;
    write_file(p, body);
    written.push_back(p.string());
  };
  for (const auto& f : formats) {
    if (f == "json") put("report.json", to_json(r).dump(2) + "\n");
    if (f == "csv") {
      put("checks.csv", checks_csv(r));
      put("series.csv", series_csv(r));
    }
    if (f == "text") put("summary.txt", text_summary(r));
  }
  return written;
}

}  // namespace dchain::harness
