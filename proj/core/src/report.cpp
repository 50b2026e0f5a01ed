// SPDX-License-Identifier: Apache-2.0
#include <grushin/report.hpp>

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>

namespace grushin {

using nlohmann::json;

namespace {

json config_json(const SuiteConfig& cfg) {
  json j;
  j["p"] = cfg.params.p;
  j["q"] = cfg.params.q;
  j["alpha"] = cfg.params.alpha;
  j["seed"] = cfg.seed;
  j["points"] = cfg.points;
  j["tol_scale"] = cfg.tol_scale;
  j["tol_override"] = cfg.tol_override;
  j["suites"] = cfg.suites;
  j["jobs"] = cfg.jobs;
  j["out"] = cfg.out;
  j["csv_dir"] = cfg.csv_dir;
  return j;
}

SuiteConfig config_from(const json& j, const std::string& origin) {
  SuiteConfig cfg;
  try {
    if (!j.is_object()) throw ConfigError(origin + ": top level must be an object");
    static const char* known[] = {"p",      "q",    "alpha",  "seed", "points",
                                  "tol_scale", "tol_override", "suites", "jobs",
                                  "out",    "csv_dir"};
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* k : known) ok = ok || it.key() == k;
      if (!ok) throw ConfigError(origin + ": unknown field '" + it.key() + "'");
    }
    if (j.contains("p")) cfg.params.p = j.at("p").get<int>();
    if (j.contains("q")) cfg.params.q = j.at("q").get<int>();
    if (j.contains("alpha")) cfg.params.alpha = j.at("alpha").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("points")) cfg.points = j.at("points").get<int>();
    if (j.contains("tol_scale")) cfg.tol_scale = j.at("tol_scale").get<double>();
    if (j.contains("tol_override"))
      cfg.tol_override = j.at("tol_override").get<std::map<std::string, double>>();
    if (j.contains("suites")) cfg.suites = j.at("suites").get<std::vector<std::string>>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("csv_dir")) cfg.csv_dir = j.at("csv_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  try {
    cfg.params.validate();
  } catch (const Error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

json record_json(const CheckRecord& r) {
  json j;
  j["suite"] = r.suite;
  j["check_id"] = r.check_id;
  j["anchor"] = r.anchor;
  j["inputs_digest"] = r.inputs_digest;
  j["residual"] = r.residual;
  j["tolerance"] = r.tolerance;
  j["status"] = to_string(r.status);
  j["repro"] = r.repro;
  j["note"] = r.note;
  return j;
}

CheckRecord record_from(const json& j) {
  CheckRecord r;
  r.suite = j.at("suite").get<std::string>();
  r.check_id = j.at("check_id").get<std::string>();
  r.anchor = j.at("anchor").get<std::string>();
  r.inputs_digest = j.at("inputs_digest").get<std::string>();
  r.residual = j.at("residual").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  const std::string st = j.at("status").get<std::string>();
  r.status = st == "PASS" ? CheckStatus::Pass
                          : (st == "FAIL" ? CheckStatus::Fail : CheckStatus::Skip);
  r.repro = j.at("repro").get<std::string>();
  r.note = j.at("note").get<std::string>();
  return r;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

SuiteConfig config_from_json_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return config_from(j, origin);
}

SuiteConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str(), path);
}

std::string config_to_json(const SuiteConfig& cfg) { return config_json(cfg).dump(2); }

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

SuiteSummary SuiteReport::summary() const {
  SuiteSummary s;
  for (const auto& r : records) {
    if (r.status == CheckStatus::Pass) ++s.pass;
    else if (r.status == CheckStatus::Fail) ++s.fail;
    else ++s.skip;
  }
  return s;
}

bool SuiteReport::all_passed() const { return summary().fail == 0; }

std::string report_to_json(const SuiteReport& report) {
  json j;
  j["schema_version"] = report.schema_version;
  j["config"] = config_json(report.config);
  j["records"] = json::array();
  for (const auto& r : report.records) j["records"].push_back(record_json(r));
  const SuiteSummary s = report.summary();
  j["summary"] = {{"pass", s.pass}, {"fail", s.fail}, {"skip", s.skip}};
  j["artifacts"] = report.artifacts;
  j["runtime_seconds"] = report.runtime_seconds;
  return j.dump(2) + "\n";
}

SuiteReport report_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("report parse: ") + e.what());
  }
  SuiteReport rep;
  rep.schema_version = j.at("schema_version").get<std::string>();
  rep.config = config_from(j.at("config"), "report config");
  for (const auto& r : j.at("records")) rep.records.push_back(record_from(r));
  rep.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  rep.runtime_seconds = j.at("runtime_seconds").get<double>();
  return rep;
}

SuiteReport report_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return report_from_json_text(ss.str());
}

void emit_report(const SuiteReport& report, const std::string& path, ReportFormat fmt) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  if (fmt == ReportFormat::Json) {
    out << report_to_json(report);
  } else {
    out << "suite,check_id,anchor,inputs_digest,residual,tolerance,status,repro,note\n";
    std::ostringstream line;
    line.precision(17);
    for (const auto& r : report.records) {
      line.str("");
      line << r.residual << ',' << r.tolerance;
      out << csv_escape(r.suite) << ',' << csv_escape(r.check_id) << ','
          << csv_escape(r.anchor) << ',' << r.inputs_digest << ',' << line.str() << ','
          << to_string(r.status) << ',' << csv_escape(r.repro) << ','
          << csv_escape(r.note) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

void DigestBuilder::byte(unsigned char b) {
  state_ ^= b;
  state_ *= 1099511628211ULL;
}

DigestBuilder& DigestBuilder::add(double v) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof v);
  std::memcpy(&bits, &v, sizeof bits);
  return add(bits);
}

DigestBuilder& DigestBuilder::add(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>(v >> (8 * i)));
  return *this;
}

DigestBuilder& DigestBuilder::add(int v) {
  return add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
}

DigestBuilder& DigestBuilder::add(const std::string& s) {
  for (char c : s) byte(static_cast<unsigned char>(c));
  byte(0xffu);  // separator
  return *this;
}

std::string DigestBuilder::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[i] = digits[(state_ >> (60 - 4 * i)) & 0xf];
  return out;
}

}  // namespace grushin
