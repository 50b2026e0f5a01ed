// SPDX-License-Identifier: Apache-2.0
#include <grushin/report.hpp>
#include <grushin/suites.hpp>

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace grushin;

TEST_CASE("config round-trips through JSON") {
  SuiteConfig cfg;
  cfg.params = GrushinParams{4, 2, 0.5};
  cfg.seed = 1234567890123ULL;
  cfg.points = 64;
  cfg.tol_scale = 2.0;
  cfg.tol_override["scal_pinned_instance"] = 1e-9;
  cfg.suites = {"curvature", "cones"};
  cfg.jobs = 3;
  cfg.out = "report.json";
  cfg.csv_dir = "tables";

  SuiteConfig back = config_from_json_text(config_to_json(cfg), "test");
  CHECK(back.params.p == 4);
  CHECK(back.params.q == 2);
  CHECK(back.params.alpha == doctest::Approx(0.5));
  CHECK(back.seed == cfg.seed);
  CHECK(back.points == 64);
  CHECK(back.tol_scale == doctest::Approx(2.0));
  CHECK(back.tol_override.at("scal_pinned_instance") == doctest::Approx(1e-9));
  CHECK(back.suites == cfg.suites);
  CHECK(back.jobs == 3);
}

TEST_CASE("unknown config fields are rejected") {
  CHECK_THROWS_AS((void)config_from_json_text(R"({"p": 3, "qq": 1})", "test"),
                  ConfigError);
  CHECK_THROWS_AS((void)config_from_json_text("not json", "test"), ConfigError);
  CHECK_THROWS_AS((void)config_from_json_text(R"({"alpha": -1.0})", "test"),
                  ConfigError);
}

TEST_CASE("report round-trips through JSON") {
  SuiteReport rep;
  rep.config.seed = 7;
  CheckRecord rec;
  rec.suite = "curvature";
  rec.check_id = "demo_check";
  rec.anchor = "Scal = -kappa (p-2)(p-1)";
  rec.inputs_digest = "deadbeef";
  rec.residual = 1.25e-9;
  rec.tolerance = 1e-8;
  rec.status = CheckStatus::Pass;
  rep.records.push_back(rec);
  rec.check_id = "demo_fail";
  rec.status = CheckStatus::Fail;
  rec.repro = "verify --suite curvature";
  rep.records.push_back(rec);
  rec.check_id = "demo_skip";
  rec.status = CheckStatus::Skip;
  rec.note = "requires p >= 3";
  rep.records.push_back(rec);
  rep.artifacts.push_back("tables/quotient.csv");
  rep.runtime_seconds = 1.5;

  SuiteReport back = report_from_json_text(report_to_json(rep));
  REQUIRE(back.records.size() == 3);
  CHECK(back.records[0].anchor == rec.anchor);
  CHECK(back.records[0].residual == doctest::Approx(1.25e-9));
  CHECK(back.records[1].status == CheckStatus::Fail);
  CHECK(back.records[1].repro == "verify --suite curvature");
  CHECK(back.records[2].note == "requires p >= 3");
  CHECK(back.artifacts == rep.artifacts);
  CHECK(back.summary().pass == 1);
  CHECK(back.summary().fail == 1);
  CHECK(back.summary().skip == 1);
  CHECK_FALSE(back.all_passed());
}

TEST_CASE("CSV report carries one row per record with the fixed header") {
  SuiteReport rep;
  CheckRecord rec;
  rec.suite = "cones";
  rec.check_id = "with,comma";
  rec.anchor = "a \"quoted\" anchor";
  rec.residual = 0.5;
  rec.tolerance = 1.0;
  rep.records.push_back(rec);

  std::string path = "report_test_tmp.csv";
  emit_report(rep, path, ReportFormat::Csv);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "suite,check_id,anchor,inputs_digest,residual,tolerance,status,repro,note");
  CHECK(row.find("\"with,comma\"") != std::string::npos);
  CHECK(row.find("\"a \"\"quoted\"\" anchor\"") != std::string::npos);
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("digest builder is deterministic and order-sensitive") {
  auto h1 = DigestBuilder().add(1.5).add(std::uint64_t{7}).add("x").hex();
  auto h2 = DigestBuilder().add(1.5).add(std::uint64_t{7}).add("x").hex();
  auto h3 = DigestBuilder().add("x").add(std::uint64_t{7}).add(1.5).hex();
  CHECK(h1 == h2);
  CHECK(h1 != h3);
  CHECK(h1.size() == 16);
}

TEST_CASE("identical configs produce byte-identical reports") {
  SuiteConfig cfg;
  cfg.params = GrushinParams{3, 1, 1.0};
  cfg.seed = 99;
  cfg.points = 8;
  cfg.suites = {"curvature"};
  cfg.jobs = 4;

  SuiteReport a = run_suite(cfg);
  SuiteReport b = run_suite(cfg);
  // Wall time is the one legitimately nondeterministic field.
  a.runtime_seconds = b.runtime_seconds = 0.0;
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(a.summary().fail == 0);
}
