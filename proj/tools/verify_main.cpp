// SPDX-License-Identifier: Apache-2.0
//
// verify: run the verification suites and emit a machine-readable report.
// Exit codes: 0 all pass, 1 any check failed, 2 configuration error,
// 3 internal error.

#include <grushin/report.hpp>
#include <grushin/suites.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace grushin;

  CLI::App app{"Verification suites for the Grushin-type metric library"};

  std::string suite;
  std::string config_path;
  std::string out;
  std::string csv_dir;
  int p = 0, q = 0, points = 0, jobs = 0;
  double alpha = 0.0, tol_scale = 0.0;
  std::uint64_t seed = 0;

  app.add_option("--suite", suite, "curvature|cones|conformal|umbilic|distance|all");
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  app.add_option("--p", p, "first factor dimension");
  app.add_option("--q", q, "second factor dimension");
  app.add_option("--alpha", alpha, "Grushin exponent, alpha >= 0");
  app.add_option("--seed", seed, "RNG seed (GRUSHIN_LAB_SEED is the fallback)");
  app.add_option("--points", points, "sample points per check");
  app.add_option("--tol-scale", tol_scale, "multiplies every default tolerance");
  app.add_option("--out", out, "report path (.json or .csv)");
  app.add_option("--csv-dir", csv_dir, "directory for convergence tables");
  app.add_option("--jobs", jobs, "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits cleanly
  }

  try {
    SuiteConfig cfg;
    bool file_has_seed = false;
    if (!config_path.empty()) {
      cfg = config_from_json_file(config_path);
      std::ifstream in(config_path);
      nlohmann::json j = nlohmann::json::parse(in, nullptr, true, true);
      file_has_seed = j.contains("seed");
    }

    // Precedence: flags > file > environment (seed only) > defaults.
    if (app.count("--p")) cfg.params.p = p;
    if (app.count("--q")) cfg.params.q = q;
    if (app.count("--alpha")) cfg.params.alpha = alpha;
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--points")) cfg.points = points;
    if (app.count("--tol-scale")) cfg.tol_scale = tol_scale;
    if (app.count("--jobs")) cfg.jobs = jobs;
    if (app.count("--out")) cfg.out = out;
    if (app.count("--csv-dir")) cfg.csv_dir = csv_dir;
    if (app.count("--suite")) cfg.suites = {suite};
    if (!app.count("--seed") && !file_has_seed) {
      if (const char* env = std::getenv("GRUSHIN_LAB_SEED")) {
        try {
          cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
          throw ConfigError(std::string("GRUSHIN_LAB_SEED is not an integer: ") + env);
        }
      }
    }

    SuiteReport rep = run_suite(cfg);

    if (!cfg.out.empty()) {
      ReportFormat fmt = ends_with(cfg.out, ".csv") ? ReportFormat::Csv : ReportFormat::Json;
      emit_report(rep, cfg.out, fmt);
    }

    SuiteSummary sum = rep.summary();
    for (const auto& rec : rep.records) {
      if (rec.status != CheckStatus::Fail) continue;
      std::cerr << "FAIL " << rec.suite << "/" << rec.check_id << ": residual "
                << rec.residual << " > tolerance " << rec.tolerance << "\n  repro: "
                << rec.repro << "\n";
      if (!rec.note.empty()) std::cerr << "  note: " << rec.note << "\n";
    }
    std::cout << "checks: " << sum.pass << " pass, " << sum.fail << " fail, " << sum.skip
              << " skip (" << rep.runtime_seconds << " s)" << std::endl;
    return sum.fail == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << std::endl;
    return 3;
  }
}
