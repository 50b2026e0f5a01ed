// SPDX-License-Identifier: Apache-2.0
#include <grushin/suites.hpp>

#include <doctest.h>

#include <atomic>
#include <numeric>
#include <vector>

using namespace grushin;

TEST_CASE("sample clouds are deterministic and stay in the band") {
  SuiteConfig cfg;
  cfg.params = GrushinParams{3, 2, 0.5};
  cfg.seed = 77;
  cfg.points = 37;
  auto a = sample_points(cfg);
  auto b = sample_points(cfg);
  REQUIRE(a.size() == 37);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].r == b[i].r);
    CHECK((a[i].y - b[i].y).norm() == 0.0);
    CHECK((a[i].theta - b[i].theta).norm() == 0.0);
    CHECK(a[i].r >= 0.5);
    CHECK(a[i].r <= 2.0);
    CHECK(std::abs(a[i].theta.norm() - 1.0) < 1e-12);
    CHECK(a[i].y.cwiseAbs().maxCoeff() <= 1.5);
  }
  cfg.seed = 78;
  auto c = sample_points(cfg);
  CHECK(a[0].r != c[0].r);
}

TEST_CASE("parallel_for visits every index once and rethrows by index") {
  std::vector<int> hits(101, 0);
  parallel_for(101, 4, [&](int i) { hits[i] += 1; });
  CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 101);
  CHECK(*std::min_element(hits.begin(), hits.end()) == 1);

  // The reported failure must be the lowest failing index, not the first
  // one a worker happened to reach.
  try {
    parallel_for(64, 4, [&](int i) {
      if (i == 13 || i == 57) throw InvalidInput("boom " + std::to_string(i));
    });
    FAIL("expected a throw");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()) == "boom 13");
  }
}

TEST_CASE("run_suite executes a small curvature pass") {
  SuiteConfig cfg;
  cfg.params = GrushinParams{3, 1, 1.0};
  cfg.seed = 5;
  cfg.points = 6;
  cfg.suites = {"curvature"};
  SuiteReport rep = run_suite(cfg);
  CHECK(rep.summary().fail == 0);
  CHECK(rep.summary().pass >= 8);
  for (const CheckRecord& rec : rep.records) {
    CHECK(rec.suite == "curvature");
    CHECK(!rec.anchor.empty());
    CHECK(!rec.inputs_digest.empty());
  }
  CHECK(rep.runtime_seconds > 0.0);
}

TEST_CASE("tolerance overrides flip a passing check") {
  SuiteConfig cfg;
  cfg.params = GrushinParams{3, 1, 1.0};
  cfg.seed = 5;
  cfg.points = 4;
  cfg.suites = {"curvature"};
  cfg.tol_override["christoffel_fd_vs_closed"] = 1e-30;
  SuiteReport rep = run_suite(cfg);
  bool found = false;
  for (const CheckRecord& rec : rep.records)
    if (rec.check_id == "christoffel_fd_vs_closed") {
      found = true;
      CHECK(rec.status == CheckStatus::Fail);
      CHECK(!rec.repro.empty());
    }
  CHECK(found);
}

TEST_CASE("unknown suites and bad parameters are config errors") {
  SuiteConfig cfg;
  cfg.suites = {"nonsense"};
  CHECK_THROWS_AS((void)run_suite(cfg), ConfigError);
  cfg.suites = {"all"};
  cfg.points = 0;
  CHECK_THROWS_AS((void)run_suite(cfg), ConfigError);
}
