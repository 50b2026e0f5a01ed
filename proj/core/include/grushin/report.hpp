// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <grushin/errors.hpp>
#include <grushin/params.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace grushin {

// Resolved run configuration. Round-trips losslessly through JSON; the CLI
// resolves precedence as flags > config file > defaults before calling in.
struct SuiteConfig {
  GrushinParams params;
  std::uint64_t seed = 42;
  int points = 200;
  double tol_scale = 1.0;
  std::map<std::string, double> tol_override;  // keyed by check id
  std::vector<std::string> suites{"all"};
  int jobs = 0;  // worker threads; 0 = hardware concurrency
  std::string out;
  std::string csv_dir;
};

SuiteConfig config_from_json_text(const std::string& text, const std::string& origin);
SuiteConfig config_from_json_file(const std::string& path);
std::string config_to_json(const SuiteConfig& cfg);

enum class CheckStatus { Pass, Fail, Skip };
std::string to_string(CheckStatus s);

struct CheckRecord {
  std::string suite;
  std::string check_id;
  std::string anchor;         // formula string tying the check to its claim
  std::string inputs_digest;  // FNV-1a hex of the check inputs
  double residual = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::Pass;
  std::string repro;  // reproduction command, set on FAIL
  std::string note;   // skip reason and similar
};

struct SuiteSummary {
  int pass = 0;
  int fail = 0;
  int skip = 0;
};

struct SuiteReport {
  std::string schema_version = "1";
  SuiteConfig config;
  std::vector<CheckRecord> records;
  std::vector<std::string> artifacts;  // relative CSV paths (distance tables)
  double runtime_seconds = 0.0;

  SuiteSummary summary() const;
  bool all_passed() const;
};

enum class ReportFormat { Json, Csv };

// JSON schema: {schema_version, config, records[], summary{pass,fail,skip},
// artifacts[], runtime_seconds}. CSV rows correspond 1:1 to records.
std::string report_to_json(const SuiteReport& report);
SuiteReport report_from_json_text(const std::string& text);
SuiteReport report_from_json_file(const std::string& path);
void emit_report(const SuiteReport& report, const std::string& path, ReportFormat fmt);

// 64-bit FNV-1a over a canonical byte stream; doubles hashed by bit pattern.
class DigestBuilder {
 public:
  DigestBuilder& add(double v);
  DigestBuilder& add(std::uint64_t v);
  DigestBuilder& add(int v);
  DigestBuilder& add(const std::string& s);
  std::string hex() const;

 private:
  void byte(unsigned char b);
  std::uint64_t state_ = 14695981039346656037ULL;
};

}  // namespace grushin
