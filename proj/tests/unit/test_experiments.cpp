#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fairmon/error.hpp"
#include "fairmon/experiments.hpp"
#include "fairmon/oracle.hpp"

using namespace fairmon;

namespace {

std::filesystem::path scratch_dir(const char* name) {
  auto p = std::filesystem::temp_directory_path() / ("fairmon_test_" + std::string(name));
  std::filesystem::remove_all(p);
  return p;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("generated models validate") {
  for (const ObservationModel& m : {hypercube_model(3), lending_mc(), admission_mc(), lending_pomc()}) {
    CHECK_NOTHROW(m.validate());
    CHECK(is_irreducible(m));
  }
  ObservationModel adm = admission_mc();
  CHECK(adm.size() == 3 + 5);
  CHECK(adm.transition(adm.state_index("g"), adm.state_index("4")) == doctest::Approx(0.3));
  CHECK(adm.transition(adm.state_index("ng"), adm.state_index("0")) == doctest::Approx(0.3));
  CHECK(adm.transition(adm.state_index("2"), adm.state_index("init")) == 1.0);
  ObservationModel pomc = lending_pomc();
  CHECK(pomc.transition(0, 0) == doctest::Approx(0.2));
  CHECK(pomc.alphabet().size() == 5);
  CHECK_THROWS_AS(lending_mc({1.5, 0.5, 0.5, 0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(hypercube_model(0), DomainError);
  AdmissionParams bad;
  bad.invest_g = {1.0, 2.0};
  CHECK_THROWS_AS(admission_mc(bad), DomainError);
}

TEST_CASE("lending chain: demographic parity equals the grant-rate difference") {
  for (double pg : {0.3, 0.6, 0.9}) {
    for (double png : {0.1, 0.6}) {
      LendingMcParams p;
      p.p_grant_g = pg;
      p.p_grant_ng = png;
      CHECK(truth_value(lending_mc(p), lending_demographic_parity()) == doctest::Approx(pg - png).epsilon(1e-12));
    }
  }
}

TEST_CASE("non-convergent sequence alternates between 1/3 and 2/3") {
  auto pts = run_nonconvergent(30);
  REQUIRE(pts.size() == 30);
  CHECK(pts[0].t == 1);
  CHECK(pts[0].value == 0.0);
  CHECK(pts[1].t == 3);
  CHECK(pts[1].value == doctest::Approx(2.0 / 3.0));
  for (const auto& p : pts) {
    CHECK(p.t == (std::int64_t{1} << (p.k + 1)) - 1);
    double target = p.k % 2 == 1 ? 2.0 / 3.0 : 1.0 / 3.0;
    if (p.k >= 1) CHECK(std::abs(p.value - target) <= std::ldexp(1.0, -p.k));
  }
  CHECK(std::abs(pts[12].value - 0.333292638262) < 1e-12);
  CHECK_THROWS_AS(run_nonconvergent(41), DomainError);
}

TEST_CASE("coverage driver: small hypercube run is deterministic and merges in order") {
  CoverageConfig cfg;
  cfg.name = "small";
  cfg.model = hypercube_model(3);
  cfg.spec = hypercube_tdp();
  cfg.monitor = {Engine::pomc, 0.05, Soundness::pointwise, 7.45, 0, false};
  cfg.runs = 8;
  cfg.horizon = 3000;
  cfg.checkpoints = {10, 100, 1000};
  cfg.threads = 4;
  CoverageReport a = run_coverage(cfg);
  cfg.threads = 1;
  CoverageReport b = run_coverage(cfg);
  REQUIRE(a.rows.size() == 4);
  CHECK(a.rows.back().t == 3000);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].mean_point == b.rows[i].mean_point);
    CHECK(a.rows[i].covered == b.rows[i].covered);
    CHECK(a.rows[i].covered <= cfg.runs);
    if (i > 0) CHECK(a.rows[i].t > a.rows[i - 1].t);
  }
  CHECK(a.truth == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(a.covered_all_steps <= a.covered_at_horizon);
  CHECK(a.mean_step_ns > 0.0);
}

TEST_CASE("timing driver reports size and registers") {
  MonitorConfig mc{Engine::mc, 0.05, Soundness::pointwise, 1.0, 0, false};
  TimingResult r = time_monitor("admission", admission_mc(), admission_social_burden(), mc, 20000, 1);
  CHECK(r.expression_size == 19);
  CHECK(r.events == 20000);
  CHECK(r.mean_ns > 0.0);
  CHECK(r.registers > 0);
  CHECK(r.peak_buffer <= 1);
}

TEST_CASE("experiment runner writes report, series and manifest") {
  auto dir = scratch_dir("exp");
  ExperimentOptions opts;
  nlohmann::json fig3 = run_experiment("fig3-ratio", dir.string(), opts);
  CHECK(fig3["rows"][0]["ratio"].get<double>() == 1.0);
  CHECK(std::abs(fig3["rows"][1]["ratio"].get<double>() - 2.1798181802243118) < 1e-6);
  for (const char* f : {"report.json", "series.csv", "manifest.json"}) CHECK(std::filesystem::exists(dir / "fig3-ratio" / f));
  auto csv = lines_of(dir / "fig3-ratio" / "series.csv");
  CHECK(csv.size() == 11);
  CHECK(csv[0] == "n,ours_half_width,baseline_half_width,ratio");

  run_experiment("fig4-uniform", dir.string(), opts);
  auto fig4 = lines_of(dir / "fig4-uniform" / "series.csv");
  CHECK(fig4[0] == "t,stitched,poly_union,exp_union,pointwise");
  CHECK(fig4.size() > 100);

  opts.runs = 3;
  opts.horizon = 2000;
  nlohmann::json lend = run_experiment("lending-mc", dir.string(), opts);
  CHECK(lend["pointwise"]["runs"].get<int>() == 3);
  std::ifstream mf(dir / "lending-mc" / "manifest.json");
  nlohmann::json manifest = nlohmann::json::parse(mf);
  CHECK(manifest["seed"].get<int>() == 1);
  CHECK(manifest.contains("mean_step_ns"));
  CHECK(manifest["parameters"]["delta"].get<double>() == 0.05);

  CHECK_THROWS_AS(run_experiment("nope", dir.string(), opts), Error);
  std::filesystem::remove_all(dir);
}
