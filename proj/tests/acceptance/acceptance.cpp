// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <fmt/format.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include "fairmon/bounds.hpp"
#include "fairmon/experiments.hpp"
#include "fairmon/oracle.hpp"
#include "fairmon/parser.hpp"
#include "fairmon/polynomial.hpp"

using namespace fairmon;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

long resident_kib() {
  std::ifstream in("/proc/self/statm");
  long size = 0, resident = 0;
  in >> size >> resident;
  return resident * (sysconf(_SC_PAGESIZE) / 1024);
}

Outcome coverage_pair(const std::string& name, const ObservationModel& model, const Expression& spec, double tau) {
  CoverageConfig cfg;
  cfg.model = model;
  cfg.spec = spec;
  cfg.runs = 100;
  cfg.horizon = 100'000;
  cfg.seed = 20240601;
  cfg.name = name + "/pointwise";
  cfg.monitor = {Engine::pomc, 0.05, Soundness::pointwise, tau, 0, false};
  auto t0 = Clock::now();
  CoverageReport pw = run_coverage(cfg);
  cfg.name = name + "/uniform";
  cfg.monitor.mode = Soundness::uniform;
  CoverageReport un = run_coverage(cfg);
  double secs = seconds_since(t0);
  // at the horizon every verdict must be an actual interval, and the truth
  // must lie inside it in at least 93 runs
  int pw_inside = pw.bounded_at_horizon == pw.runs ? pw.covered_at_horizon : 0;
  bool pass = pw_inside >= 93 && un.covered_all_steps >= 93;
  return {pass, fmt::format("truth {:.6g}; pointwise: {}/100 contain truth at t=1e5 ({} bounded, mean half-width "
                            "{:.4f}); uniform: {}/100 contain truth at every step ({} bounded at t=1e5); {:.1f}s",
                            pw.truth, pw.covered_at_horizon, pw.bounded_at_horizon, pw.rows.back().mean_half_width,
                            un.covered_all_steps, un.bounded_at_horizon, secs)};
}

Outcome criterion_1() {
  const double tau = 3.0 * (std::log(3.0) + std::log(4.0));
  return coverage_pair("hypercube", hypercube_model(3), hypercube_tdp(), tau);
}

Outcome criterion_2() {
  const double expected = std::sqrt(204.94 / 7.45);
  ObservationModel h = hypercube_model(3);
  Alphabet alphabet = h.alphabet();
  PomcMonitor fast(hypercube_tdp(), alphabet, {0.05, Soundness::pointwise, 7.45, false});
  PomcMonitor slow(hypercube_tdp(), alphabet, {0.05, Soundness::pointwise, 204.94, false});
  Simulator sim(h, 11, StartMode::stationary);
  double worst = 0.0;
  bool narrower = true;
  for (std::int64_t t = 1; t <= 200'000; ++t) {
    int sym = alphabet.id(h.labels[static_cast<std::size_t>(sim.next_state())]);
    Verdict a = fast.next(sym);
    Verdict b = slow.next(sym);
    if (t < 2) continue;
    for (std::size_t i = 0; i < fast.atoms().size(); ++i) {
      double r = slow.atoms()[i].last_half_width() / fast.atoms()[i].last_half_width();
      worst = std::max(worst, std::abs(r - expected));
    }
    if (a.is_bounded() && b.is_bounded()) narrower = narrower && a.interval.width() <= b.interval.width();
  }
  return {worst <= 1e-9 && narrower,
          fmt::format("half-width ratio sqrt(204.94/7.45) = {:.12f}, max deviation over t in [2,2e5] {:.2e}; "
                      "tau=7.45 intervals never wider: {}",
                      expected, worst, narrower)};
}

Outcome criterion_3() {
  ObservationModel m;
  m.states = {"1", "2", "3"};
  m.labels = m.states;
  m.transition.resize(3, 3);
  m.transition << 0.2, 0.3, 0.5, 0.4, 0.3, 0.3, 0.5, 0.25, 0.25;
  m.initial = Eigen::Vector3d(1, 0, 0);
  m.validate();
  Expression phi = parse_expression("T[1->2] * T[1->3]");
  const double truth = truth_value(m, phi);
  auto t0 = Clock::now();
  DivisionFreeMonitor mon(phi, m.alphabet(), {0.05, Soundness::pointwise, 2024, {}});
  Simulator sim(m, 77, StartMode::stationary);
  double sum = 0.0, sum_sq = 0.0;
  std::int64_t n = 0, events = 0;
  while (n < 200'000) {
    mon.next(sim.next_state());
    ++events;
    if (auto y = mon.last_outcome()) {
      sum += *y;
      sum_sq += *y * *y;
      ++n;
    }
  }
  double secs = seconds_since(t0);
  double mean = sum / static_cast<double>(n);
  double se = std::sqrt((sum_sq / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
  double z = (mean - 0.15) / se;
  bool pass = std::abs(truth - 0.15) < 1e-12 && std::abs(z) <= 3.0 && secs < 30.0;
  return {pass, fmt::format("{} outcomes from {} events: mean {:.5f}, SE {:.5f}, z = {:+.2f} vs 0.15; {:.2f}s", n,
                            events, mean, se, z, secs)};
}

Outcome criterion_4() {
  auto dir = std::filesystem::temp_directory_path() / "fairmon_acceptance";
  nlohmann::json rep = run_experiment("fig3-ratio", dir.string(), {});
  std::filesystem::remove_all(dir);
  const double expected = 2.0 * std::sqrt(std::log(80.0) / std::log(40.0));
  std::vector<double> ratios;
  for (const auto& row : rep["rows"]) ratios.push_back(row["ratio"].get<double>());
  bool monotone = true;
  for (std::size_t i = 1; i < ratios.size(); ++i) monotone = monotone && ratios[i] >= ratios[i - 1];
  double dev = std::abs(ratios.at(1) - expected);
  return {ratios.size() == 10 && dev <= 1e-6 && monotone,
          fmt::format("n=2 ratio {:.9f} (expected {:.9f}, |diff| {:.1e}); n=10 ratio {:.4f}; nondecreasing: {}",
                      ratios.at(1), expected, dev, ratios.back(), monotone)};
}

Outcome criterion_5() {
  std::int64_t violations = 0;
  double max_ratio = 0.0;
  for (std::int64_t t = 1000; t <= 1'000'000; ++t) {
    double st = ci_mc_uniform(t, 0.05, 1.0);
    double poly = naive_uniform_lift(0.05, t, LiftScaling::polynomial);
    double ex = naive_uniform_lift(0.05, t, LiftScaling::exponential);
    if (!(st < poly && st < ex)) ++violations;
    max_ratio = std::max(max_ratio, st / std::min(poly, ex));
  }
  return {violations == 0, fmt::format("stitched below both lifts at every integer t in [1e3,1e6]: {} violations; "
                                       "max stitched/min(lift) = {:.4f}",
                                       violations, max_ratio)};
}

Outcome criterion_6() {
  double a = ci_mc_pointwise(100, 0.05, 1.0);
  double b = ci_pomc_pointwise(0.05, 1000, 1, 0.0, 1.0, 1.0);
  double da = std::abs(a - 0.13581015157406195);
  double db = std::abs(b - 0.12884082250402127);
  double one_line = std::sqrt(std::log(40.0) / 200.0);
  return {da <= 1e-12 && db <= 1e-12 && std::abs(a - one_line) <= 1e-12,
          fmt::format("ci_mc_pointwise(100,.05,1) = {:.17g} (|diff| {:.1e}); ci_pomc_pointwise(.05,1000,1,0,1,1) = "
                      "{:.17g} (|diff| {:.1e})",
                      a, da, b, db)};
}

Outcome criterion_7() {
  bool pass = true;
  std::string detail;
  for (int m = 1; m <= 4; ++m) {
    std::optional<Expression> prod;
    for (int i = 0; i < m; ++i) {
      Expression f = Expression::transition("q", "s" + std::to_string(2 * i)) +
                     Expression::transition("q", "s" + std::to_string(2 * i + 1));
      prod = prod ? *prod * f : f;
    }
    PolynomialForm p = to_polynomial(*prod);
    std::size_t size = symbol_size(p);
    std::size_t expected_size = (std::size_t{1} << (m + 1)) * static_cast<std::size_t>(m) - 1;
    pass = pass && p.terms.size() == (std::size_t{1} << m) && size == expected_size;
    detail += fmt::format("{}m={}: {} monomials, size {}", m == 1 ? "" : "; ", m, p.terms.size(), size);
  }
  return {pass, detail};
}

Outcome criterion_8() {
  auto pts = run_nonconvergent(30);
  double worst = 0.0;
  for (const auto& p : pts) {
    if (p.k < 12) continue;
    double target = p.k % 2 == 1 ? 2.0 / 3.0 : 1.0 / 3.0;
    worst = std::max(worst, std::abs(p.value - target));
  }
  return {worst <= std::ldexp(1.0, -10),
          fmt::format("max |mean - target| over k in [12,29]: {:.3e} (tolerance {:.3e}); k=29 mean {:.12f}", worst,
                      std::ldexp(1.0, -10), pts.back().value)};
}

Outcome criterion_9() {
  ObservationModel model = admission_mc();
  Expression spec = admission_social_burden();
  MonitorConfig mc{Engine::mc, 0.05, Soundness::pointwise, 1.0, 0, false};
  TimingResult timing = time_monitor("admission", model, spec, mc, 1'000'000, 3);

  // soak: 1e7 events through one monitor, resident set sampled along the way
  Alphabet alphabet = model.alphabet();
  std::vector<int> ids;
  for (const auto& l : model.labels) ids.push_back(alphabet.id(l));
  PseMonitor mon(spec, alphabet, {0.05, Soundness::pointwise, 5, {}});
  Simulator sim(model, 6, StartMode::stationary);
  long rss_after_warmup = 0, rss_max = 0;
  double sink = 0.0;
  for (std::int64_t t = 1; t <= 10'000'000; ++t) {
    Verdict v = mon.next(ids[static_cast<std::size_t>(sim.next_state())]);
    if (v.is_bounded()) sink += v.interval.width();
    if (t % 500'000 == 0) {
      long rss = resident_kib();
      if (t == 1'000'000) rss_after_warmup = rss;
      if (t >= 1'000'000) rss_max = std::max(rss_max, rss);
    }
  }
  long growth = rss_max - rss_after_warmup;
  std::size_t peak = mon.parts().front().peak_buffer();
  bool pass = timing.expression_size == 19 && timing.mean_ns < 1e6 && growth <= 256 && peak <= 1 &&
              mon.parts().front().counters_consistent() && std::isfinite(sink);
  return {pass, fmt::format("size-{} PSE, {} events: mean update {:.3f} us (limit 1000 us, target 100 us), {} "
                            "registers; 1e7-event soak: RSS {} KiB after 1e6, max {} KiB (growth {} KiB, limit 256), "
                            "peak slot buffer {}",
                            timing.expression_size, timing.events, timing.mean_ns / 1000.0, timing.registers,
                            rss_after_warmup, rss_max, growth, peak)};
}

Outcome criterion_10() {
  ObservationModel model = lending_pomc();
  double tau = mixing_time_bound(model).tau_mix;
  Outcome o = coverage_pair("lending-pomc", model, lending_pomc_demographic_parity(), tau);
  o.detail = fmt::format("generated 7-state model, numerically computed tau_mix {}; ", tau) + o.detail;
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"hypercube coverage", criterion_1},
      {"mixing-bound effect", criterion_2},
      {"MC monitor unbiasedness", criterion_3},
      {"union-bound ratio", criterion_4},
      {"uniform bound ordering", criterion_5},
      {"formula exactness", criterion_6},
      {"normal-form size law", criterion_7},
      {"non-convergence demo", criterion_8},
      {"latency and constant memory", criterion_9},
      {"lending POMC coverage (oracle on generated model)", criterion_10},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    fmt::print("[{}] {:2d} {}: {}\n", o.pass ? "PASS" : "FAIL", index, name, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
