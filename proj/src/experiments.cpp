#include "fairmon/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "fairmon/error.hpp"
#include "fairmon/oracle.hpp"

namespace fairmon {

using nlohmann::json;

namespace {

ObservationModel make_model(std::vector<std::string> states, std::vector<Symbol> labels) {
  ObservationModel m;
  const auto n = static_cast<Eigen::Index>(states.size());
  m.states = std::move(states);
  m.labels = std::move(labels);
  m.transition = Eigen::MatrixXd::Zero(n, n);
  m.initial = Eigen::VectorXd::Zero(n);
  m.initial(0) = 1.0;
  return m;
}

void set(ObservationModel& m, std::string_view from, std::string_view to, double p) {
  m.transition(m.state_index(from), m.state_index(to)) += p;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(fmt::format("{} must be a probability, got {}", what, p));
}

Expression tvar(const char* q, const char* r) { return Expression::transition(q, r); }

std::vector<double> normalised_or_default(std::vector<double> v, int levels, bool increasing) {
  auto n = static_cast<std::size_t>(levels + 1);
  if (v.empty()) {
    for (std::size_t k = 0; k < n; ++k) v.push_back(static_cast<double>(increasing ? k + 2 : n + 1 - k));
  }
  if (v.size() != n) throw DomainError(fmt::format("expected {} investment probabilities, got {}", n, v.size()));
  double s = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) throw DomainError("investment weights must be nonnegative");
    s += x;
  }
  if (!(s > 0.0)) throw DomainError("investment weights sum to zero");
  for (double& x : v) x /= s;
  return v;
}

}  // namespace

// --- Generators --------------------------------------------------------------

ObservationModel hypercube_model(int n) {
  if (n < 1 || n > 16) throw DomainError("hypercube dimension must lie in [1,16]");
  const int size = 1 << n;
  std::vector<std::string> states;
  std::vector<Symbol> labels;
  for (int v = 0; v < size; ++v) {
    std::string bits;
    for (int b = n - 1; b >= 0; --b) bits += ((v >> b) & 1) ? '1' : '0';
    labels.push_back(bits[0] == '0' ? "a" : "b");
    states.push_back(std::move(bits));
  }
  ObservationModel m = make_model(std::move(states), std::move(labels));
  for (int v = 0; v < size; ++v) {
    m.transition(v, v) += 0.5;
    for (int b = 0; b < n; ++b) m.transition(v, v ^ (1 << b)) += 0.5 / n;
  }
  m.initial = Eigen::VectorXd::Constant(size, 1.0 / size);
  m.validate();
  return m;
}

Expression hypercube_tdp() {
  return Expression::seq_prob({{"a", "a"}}) - Expression::seq_prob({{"b", "b"}});
}

ObservationModel lending_mc(const LendingMcParams& p) {
  check_probability(p.p_group, "p_group");
  check_probability(p.p_grant_g, "p_grant_g");
  check_probability(p.p_grant_ng, "p_grant_ng");
  check_probability(p.repay_g, "repay_g");
  check_probability(p.repay_ng, "repay_ng");
  std::vector<std::string> s{"init", "g", "ng", "gy", "ngy", "ny", "z", "nz"};
  ObservationModel m = make_model(s, s);
  set(m, "init", "g", p.p_group);
  set(m, "init", "ng", 1.0 - p.p_group);
  set(m, "g", "gy", p.p_grant_g);
  set(m, "g", "ny", 1.0 - p.p_grant_g);
  set(m, "ng", "ngy", p.p_grant_ng);
  set(m, "ng", "ny", 1.0 - p.p_grant_ng);
  set(m, "gy", "z", p.repay_g);
  set(m, "gy", "nz", 1.0 - p.repay_g);
  set(m, "ngy", "z", p.repay_ng);
  set(m, "ngy", "nz", 1.0 - p.repay_ng);
  set(m, "ny", "init", 1.0);
  set(m, "z", "init", 1.0);
  set(m, "nz", "init", 1.0);
  m.validate();
  return m;
}

Expression lending_demographic_parity() { return tvar("g", "gy") - tvar("ng", "ngy"); }

Expression lending_equal_opportunity() {
  return tvar("g", "gy") * tvar("gy", "z") - tvar("ng", "ngy") * tvar("ngy", "z");
}

ObservationModel admission_mc(const AdmissionParams& p) {
  if (p.levels < 1 || p.levels > 100) throw DomainError("admission levels must lie in [1,100]");
  check_probability(p.p_group, "p_group");
  auto inv_g = normalised_or_default(p.invest_g, p.levels, true);
  auto inv_ng = normalised_or_default(p.invest_ng, p.levels, false);
  std::vector<std::string> s{"init", "g", "ng"};
  for (int k = 0; k <= p.levels; ++k) s.push_back(std::to_string(k));
  ObservationModel m = make_model(s, s);
  set(m, "init", "g", p.p_group);
  set(m, "init", "ng", 1.0 - p.p_group);
  for (int k = 0; k <= p.levels; ++k) {
    auto level = std::to_string(k);
    set(m, "g", level, inv_g[static_cast<std::size_t>(k)]);
    set(m, "ng", level, inv_ng[static_cast<std::size_t>(k)]);
    set(m, level, "init", 1.0);
  }
  m.validate();
  return m;
}

Expression admission_social_burden(int levels) {
  auto burden = [&](const char* group) {
    std::optional<Expression> sum;
    for (int k = 0; k <= levels; ++k) {
      Expression term = Expression(static_cast<double>(k)) * Expression::transition(group, std::to_string(k));
      sum = sum ? *sum + term : term;
    }
    return *sum;
  };
  return burden("g") - burden("ng");
}

ObservationModel lending_pomc(const LendingPomcParams& p) {
  check_probability(p.self_loop, "self_loop");
  check_probability(p.p_a, "p_a");
  check_probability(p.high_a, "high_a");
  check_probability(p.high_b, "high_b");
  for (double g : {p.grant_a1, p.grant_a2, p.grant_b1, p.grant_b2}) check_probability(g, "grant probability");
  if (!(p.self_loop < 1.0)) throw DomainError("self_loop must be below 1");
  ObservationModel m = make_model({"S", "A1", "A2", "B1", "B2", "Y", "N"}, {"S", "A", "A", "B", "B", "Y", "N"});
  double go = 1.0 - p.self_loop;
  set(m, "S", "S", p.self_loop);
  set(m, "S", "A1", go * p.p_a * (1.0 - p.high_a));
  set(m, "S", "A2", go * p.p_a * p.high_a);
  set(m, "S", "B1", go * (1.0 - p.p_a) * (1.0 - p.high_b));
  set(m, "S", "B2", go * (1.0 - p.p_a) * p.high_b);
  const std::pair<const char*, double> grants[] = {
      {"A1", p.grant_a1}, {"A2", p.grant_a2}, {"B1", p.grant_b1}, {"B2", p.grant_b2}};
  for (const auto& [state, g] : grants) {
    set(m, state, "Y", g);
    set(m, state, "N", 1.0 - g);
  }
  set(m, "Y", "S", 1.0);
  set(m, "N", "S", 1.0);
  m.validate();
  return m;
}

Expression lending_pomc_demographic_parity() {
  auto cond = [](const char* v, const char* u) { return Expression::seq_prob({{u, v}}) / Expression::seq_prob({{u}}); };
  return cond("Y", "A") - cond("Y", "B");
}

// --- Coverage ----------------------------------------------------------------

namespace {

struct RunResult {
  std::vector<Verdict> at_checkpoint;
  bool all_consistent = true;
  double step_ns = 0.0;
};

std::vector<int> label_ids(const ObservationModel& model, const Alphabet& alphabet) {
  std::vector<int> ids;
  for (const auto& l : model.labels) ids.push_back(alphabet.id(l));
  return ids;
}

template <class Fn>
void parallel_for(int count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(count, 1)));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

CoverageReport run_coverage(const CoverageConfig& config) {
  if (config.runs < 1) throw DomainError("runs must be positive");
  if (config.horizon < 1) throw DomainError("horizon must be positive");
  const ObservationModel& model = config.model;
  model.validate();
  const double truth = truth_value(model, config.spec);
  const Alphabet alphabet = model.alphabet();
  const std::vector<int> ids = label_ids(model, alphabet);

  std::vector<std::int64_t> checkpoints;
  for (auto t : config.checkpoints) {
    if (t >= 1 && t < config.horizon) checkpoints.push_back(t);
  }
  checkpoints.push_back(config.horizon);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  std::vector<RunResult> results(static_cast<std::size_t>(config.runs));
  parallel_for(config.runs, config.threads, [&](int r) {
    auto ur = static_cast<std::uint64_t>(r);
    Simulator sim(model, SplitMix64::derive(config.seed, 2 * ur), config.start);
    MonitorConfig mc = config.monitor;
    mc.seed = SplitMix64::derive(config.seed, 2 * ur + 1);
    Monitor monitor(config.spec, alphabet, mc);
    RunResult& out = results[static_cast<std::size_t>(r)];
    constexpr std::int64_t kChunk = 1 << 15;
    std::vector<int> chunk;
    chunk.reserve(kChunk);
    std::size_t next_cp = 0;
    std::int64_t t = 0;
    std::chrono::nanoseconds busy{0};
    while (t < config.horizon) {
      std::int64_t len = std::min(kChunk, config.horizon - t);
      chunk.clear();
      for (std::int64_t i = 0; i < len; ++i) chunk.push_back(ids[static_cast<std::size_t>(sim.next_state())]);
      auto start = std::chrono::steady_clock::now();
      for (int sym : chunk) {
        ++t;
        Verdict v = monitor.next(sym);
        if (!v.consistent_with(truth)) out.all_consistent = false;
        if (next_cp < checkpoints.size() && checkpoints[next_cp] == t) {
          out.at_checkpoint.push_back(v);
          ++next_cp;
        }
      }
      busy += std::chrono::steady_clock::now() - start;
    }
    out.step_ns = static_cast<double>(busy.count()) / static_cast<double>(config.horizon);
  });

  CoverageReport rep;
  rep.name = config.name;
  rep.seed = config.seed;
  rep.runs = config.runs;
  rep.horizon = config.horizon;
  rep.truth = truth;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    CheckpointRow row;
    row.t = checkpoints[c];
    row.truth = truth;
    row.min_point = std::numeric_limits<double>::infinity();
    row.max_point = -row.min_point;
    row.min_lo = std::numeric_limits<double>::infinity();
    row.max_hi = -row.min_lo;
    double sum_point = 0.0, sum_hw = 0.0;
    int with_point = 0;
    for (const auto& res : results) {
      const Verdict& v = res.at_checkpoint[c];
      if (v.consistent_with(truth)) ++row.covered;
      if (std::isfinite(v.point)) {
        sum_point += v.point;
        ++with_point;
        row.min_point = std::min(row.min_point, v.point);
        row.max_point = std::max(row.max_point, v.point);
      }
      if (v.is_bounded()) {
        ++row.bounded;
        row.min_lo = std::min(row.min_lo, v.interval.lo);
        row.max_hi = std::max(row.max_hi, v.interval.hi);
        sum_hw += 0.5 * v.interval.width();
      }
    }
    row.mean_point = with_point ? sum_point / with_point : nan;
    if (!with_point) row.min_point = row.max_point = nan;
    if (!row.bounded) row.min_lo = row.max_hi = nan;
    row.mean_half_width = row.bounded ? sum_hw / row.bounded : nan;
    rep.rows.push_back(row);
  }
  rep.covered_at_horizon = rep.rows.back().covered;
  rep.bounded_at_horizon = rep.rows.back().bounded;
  rep.min_step_ns = std::numeric_limits<double>::infinity();
  double sum_ns = 0.0;
  for (const auto& res : results) {
    if (res.all_consistent) ++rep.covered_all_steps;
    sum_ns += res.step_ns;
    rep.min_step_ns = std::min(rep.min_step_ns, res.step_ns);
    rep.max_step_ns = std::max(rep.max_step_ns, res.step_ns);
  }
  rep.mean_step_ns = sum_ns / config.runs;
  return rep;
}

std::vector<NonconvergentPoint> run_nonconvergent(int k_max) {
  if (k_max < 1 || k_max > 40) throw DomainError("k_max must lie in [1,40]");
  std::vector<NonconvergentPoint> out;
  // Block k holds t in [2^k, 2^(k+1) - 1], all with the same value, so the
  // running mean advances one block at a time.
  double sum = 0.0;
  for (int k = 0; k < k_max; ++k) {
    std::int64_t len = std::int64_t{1} << k;
    if (k % 2 == 1) sum += static_cast<double>(len);
    std::int64_t t = (std::int64_t{1} << (k + 1)) - 1;
    out.push_back({k, t, sum / static_cast<double>(t)});
  }
  return out;
}

TimingResult time_monitor(const std::string& scenario, const ObservationModel& model, const Expression& spec,
                          const MonitorConfig& config, std::int64_t events, std::uint64_t seed) {
  const Alphabet alphabet = model.alphabet();
  const std::vector<int> ids = label_ids(model, alphabet);
  Simulator sim(model, SplitMix64::derive(seed, 0), StartMode::stationary);
  MonitorConfig mc = config;
  mc.seed = SplitMix64::derive(seed, 1);
  Monitor monitor(spec, alphabet, mc);
  std::vector<int> chunk;
  std::chrono::nanoseconds busy{0};
  for (std::int64_t done = 0; done < events;) {
    std::int64_t len = std::min<std::int64_t>(1 << 16, events - done);
    chunk.clear();
    for (std::int64_t i = 0; i < len; ++i) chunk.push_back(ids[static_cast<std::size_t>(sim.next_state())]);
    auto start = std::chrono::steady_clock::now();
    for (int sym : chunk) monitor.next(sym);
    busy += std::chrono::steady_clock::now() - start;
    done += len;
  }
  TimingResult r;
  r.scenario = scenario;
  r.expression_size = expression_size(spec);
  r.events = events;
  r.mean_ns = static_cast<double>(busy.count()) / static_cast<double>(events);
  if (const PseMonitor* m = monitor.mc()) {
    for (const auto& part : m->parts()) {
      const auto& pse = part.compiled();
      r.registers += 4 + pse.nodes().size();  // prev, n, mean, eps + one memo register per node
      for (const auto& s : pse.sources()) r.registers += 1 + s.targets.size() + static_cast<std::size_t>(s.slots);
      r.peak_buffer = std::max(r.peak_buffer, part.peak_buffer());
    }
  } else if (const PomcMonitor* p = monitor.pomc()) {
    for (const auto& a : p->atoms()) r.registers += 2 + static_cast<std::size_t>(a.arity());
  }
  return r;
}

// --- Experiment runner ---------------------------------------------------------

json to_json(const CoverageReport& r) {
  auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json(nullptr); };
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"t", row.t},
                    {"truth", num(row.truth)},
                    {"mean_point", num(row.mean_point)},
                    {"min_point", num(row.min_point)},
                    {"max_point", num(row.max_point)},
                    {"min_lo", num(row.min_lo)},
                    {"max_hi", num(row.max_hi)},
                    {"mean_half_width", num(row.mean_half_width)},
                    {"covered", row.covered},
                    {"bounded", row.bounded}});
  }
  return {{"name", r.name},
          {"seed", r.seed},
          {"runs", r.runs},
          {"horizon", r.horizon},
          {"truth", num(r.truth)},
          {"covered_at_horizon", r.covered_at_horizon},
          {"bounded_at_horizon", r.bounded_at_horizon},
          {"covered_all_steps", r.covered_all_steps},
          {"timing_ns", {{"mean", r.mean_step_ns}, {"min", r.min_step_ns}, {"max", r.max_step_ns}}},
          {"rows", std::move(rows)}};
}

namespace {

std::string csv_num(double x) { return std::isfinite(x) ? fmt::format("{}", x) : std::string(); }

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
}

std::string coverage_csv(const std::vector<std::pair<std::string, const CoverageReport*>>& reports,
                         const std::function<std::string(std::int64_t)>& extra_header = nullptr,
                         const std::function<std::string(std::int64_t)>& extra = nullptr) {
  std::string out = "t,truth";
  for (const auto& [prefix, r] : reports) {
    for (const char* col : {"point", "min_point", "max_point", "min_lo", "max_hi", "half_width", "covered", "bounded"}) {
      out += fmt::format(",{}_{}", prefix, col);
    }
  }
  if (extra_header) out += extra_header(0);
  out += '\n';
  const auto& first = *reports.front().second;
  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    out += fmt::format("{},{}", first.rows[i].t, csv_num(first.truth));
    for (const auto& [prefix, r] : reports) {
      const auto& row = r->rows[i];
      out += fmt::format(",{},{},{},{},{},{},{},{}", csv_num(row.mean_point), csv_num(row.min_point),
                         csv_num(row.max_point), csv_num(row.min_lo), csv_num(row.max_hi),
                         csv_num(row.mean_half_width), row.covered, row.bounded);
    }
    if (extra) out += extra(first.rows[i].t);
    out += '\n';
  }
  return out;
}

std::vector<std::int64_t> log_checkpoints(std::int64_t horizon) {
  std::vector<std::int64_t> cps;
  for (std::int64_t base = 10; base <= horizon; base *= 10) {
    for (std::int64_t m : {1, 2, 5}) {
      if (base * m <= horizon) cps.push_back(base * m);
    }
  }
  return cps;
}

json model_summary(const ObservationModel& m) {
  return {{"states", m.states}, {"labels", m.labels}};
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"fig3-ratio", "fig4-uniform", "lending-mc",    "admission",
                                              "lending-pomc", "hypercube", "table1-timing", "nonconvergent"};
  return names;
}

json run_experiment(const std::string& name, const std::string& out_dir, const ExperimentOptions& options) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw Error(fmt::format("unknown experiment '{}'; expected one of: {}", name, fmt::join(names, ", ")));
  }
  const auto wall_start = std::chrono::steady_clock::now();
  const double delta = options.delta;
  json report;
  json params{{"delta", delta}};
  std::string csv;
  double step_ns = std::numeric_limits<double>::quiet_NaN();

  auto coverage = [&](std::string label, ObservationModel model, Expression spec, MonitorConfig mc, int runs,
                      std::int64_t horizon) {
    CoverageConfig cfg;
    cfg.name = std::move(label);
    cfg.model = std::move(model);
    cfg.spec = std::move(spec);
    cfg.monitor = mc;
    cfg.runs = options.runs > 0 ? options.runs : runs;
    cfg.horizon = options.horizon > 0 ? options.horizon : horizon;
    cfg.seed = options.seed;
    cfg.checkpoints = log_checkpoints(cfg.horizon);
    return run_coverage(cfg);
  };

  if (name == "fig3-ratio") {
    const std::int64_t t = options.horizon > 0 ? options.horizon : 1000;
    csv = "n,ours_half_width,baseline_half_width,ratio\n";
    json rows = json::array();
    for (int n = 1; n <= 10; ++n) {
      std::vector<Symbol> syms;
      for (int i = 1; i <= n; ++i) syms.push_back(std::to_string(i));
      Alphabet alphabet(syms);
      std::optional<Expression> e;
      for (const auto& s : syms) e = e ? *e + Expression::transition("1", s) : Expression::transition("1", s);
      CompiledPse pse(*e, alphabet);
      Interval range = expr_range(pse).range;
      double ours = ci_mc_pointwise(t, delta, range.width() * range.width());
      DeltaBudget budget = split_delta(delta, *e);
      std::vector<Interval> cis;
      for (double d : budget.allocation) {
        double eps = ci_mc_pointwise(t, d, 1.0);
        cis.push_back({-eps, eps});
      }
      double baseline = 0.5 * baseline_union_interval(cis, *e).width();
      double ratio = baseline / ours;
      csv += fmt::format("{},{},{},{}\n", n, ours, baseline, ratio);
      rows.push_back({{"n", n}, {"ours_half_width", ours}, {"baseline_half_width", baseline}, {"ratio", ratio}});
    }
    params["t"] = t;
    report = {{"name", name}, {"rows", rows}};
  } else if (name == "fig4-uniform") {
    const std::int64_t horizon = options.horizon > 0 ? options.horizon : 1'000'000;
    csv = "t,stitched,poly_union,exp_union,pointwise\n";
    std::int64_t crossover_poly = -1, crossover_exp = -1;
    std::int64_t last = 0;
    for (int i = 0;; ++i) {
      auto t = static_cast<std::int64_t>(std::llround(std::pow(10.0, 0.05 * i)));
      if (t > horizon) break;
      if (t == last) continue;
      last = t;
      double st = ci_mc_uniform(t, delta, 1.0);
      double pl = naive_uniform_lift(delta, t, LiftScaling::polynomial);
      double ex = naive_uniform_lift(delta, t, LiftScaling::exponential);
      if (crossover_poly < 0 && st < pl) crossover_poly = t;
      if (crossover_exp < 0 && st < ex) crossover_exp = t;
      csv += fmt::format("{},{},{},{},{}\n", t, st, pl, ex, ci_mc_pointwise(t, delta, 1.0));
    }
    params["sigma_sq"] = 1.0;
    params["horizon"] = horizon;
    report = {{"name", name},
              {"series", {"stitched", "poly_union", "exp_union", "pointwise"}},
              {"first_t_stitched_below_poly", crossover_poly},
              {"first_t_stitched_below_exp", crossover_exp}};
  } else if (name == "lending-mc" || name == "admission") {
    bool lending = name == "lending-mc";
    ObservationModel model = lending ? lending_mc() : admission_mc();
    Expression spec = lending ? lending_demographic_parity() : admission_social_burden();
    MonitorConfig mc{Engine::mc, delta, Soundness::pointwise, 1.0, 0, false};
    CoverageReport pw = coverage(name + "/pointwise", model, spec, mc, 100, 100'000);
    mc.mode = Soundness::uniform;
    CoverageReport un = coverage(name + "/uniform", model, spec, mc, 100, 100'000);
    csv = coverage_csv({{"pointwise", &pw}, {"uniform", &un}});
    step_ns = pw.mean_step_ns;
    params["spec"] = to_string(spec);
    params["model"] = model_summary(model);
    report = {{"name", name}, {"pointwise", to_json(pw)}, {"uniform", to_json(un)}};
  } else if (name == "lending-pomc") {
    ObservationModel model = lending_pomc();
    Expression spec = lending_pomc_demographic_parity();
    double tau = mixing_time_bound(model).tau_mix;
    MonitorConfig mc{Engine::pomc, delta, Soundness::pointwise, tau, 0, false};
    CoverageReport pw = coverage(name + "/pointwise", model, spec, mc, 100, 100'000);
    mc.mode = Soundness::uniform;
    CoverageReport un = coverage(name + "/uniform", model, spec, mc, 100, 100'000);
    // Projected half-width of the two-letter atoms (delta split over four leaves).
    auto header = [](std::int64_t) { return std::string(",projected_half_width_pointwise,projected_half_width_uniform"); };
    auto extra = [&](std::int64_t t) {
      double d = delta / 4.0;
      return fmt::format(",{},{}", ci_pomc_pointwise(d, t, 2, 0.0, 1.0, tau), ci_pomc_uniform(d, t, 2, 0.0, 1.0, tau));
    };
    csv = coverage_csv({{"pointwise", &pw}, {"uniform", &un}}, header, extra);
    step_ns = pw.mean_step_ns;
    params["spec"] = to_string(spec);
    params["tau_mix"] = tau;
    params["model"] = model_summary(model);
    report = {{"name", name},
              {"tau_mix", tau},
              {"projection", "projected_half_width_* columns are formula values, not observed intervals"},
              {"pointwise", to_json(pw)},
              {"uniform", to_json(un)}};
  } else if (name == "hypercube") {
    ObservationModel model = hypercube_model(3);
    Expression spec = hypercube_tdp();
    const double tau_true = 3.0 * (std::log(3.0) + std::log(4.0));
    const double tau_cons = 204.94;
    double tau_numeric = mixing_time_bound(model).tau_mix;
    MonitorConfig mc{Engine::pomc, delta, Soundness::pointwise, tau_true, 0, false};
    CoverageReport a = coverage(name + "/tau_true", model, spec, mc, 100, 100'000);
    mc.tau_mix = tau_cons;
    CoverageReport b = coverage(name + "/tau_conservative", model, spec, mc, 100, 100'000);
    mc.tau_mix = tau_true;
    mc.mode = Soundness::uniform;
    CoverageReport c = coverage(name + "/tau_true_uniform", model, spec, mc, 100, 100'000);
    csv = coverage_csv({{"tau_true", &a}, {"tau_conservative", &b}, {"tau_true_uniform", &c}});
    step_ns = a.mean_step_ns;
    params["spec"] = to_string(spec);
    params["tau_true"] = tau_true;
    params["tau_conservative"] = tau_cons;
    params["tau_numeric"] = tau_numeric;
    report = {{"name", name},
              {"tau_numeric", tau_numeric},
              {"tau_true", to_json(a)},
              {"tau_conservative", to_json(b)},
              {"tau_true_uniform", to_json(c)}};
  } else if (name == "table1-timing") {
    const std::int64_t events = options.horizon > 0 ? options.horizon : 1'000'000;
    MonitorConfig mc{Engine::mc, delta, Soundness::pointwise, 1.0, 0, false};
    std::vector<TimingResult> rs{
        time_monitor("lending + demographic parity", lending_mc({0.5, 0.8, 0.6, 0.9, 0.8}),
                     lending_demographic_parity(), mc, events, options.seed),
        time_monitor("lending + equal opportunity", lending_mc({0.5, 0.7, 0.7, 0.9, 0.9}),
                     lending_equal_opportunity(), mc, events, options.seed),
        time_monitor("admission + social burden", admission_mc(), admission_social_burden(), mc, events,
                     options.seed)};
    csv = "scenario,expression_size,events,mean_ns,registers,peak_buffer\n";
    json rows = json::array();
    double total = 0.0;
    for (const auto& r : rs) {
      csv += fmt::format("\"{}\",{},{},{},{},{}\n", r.scenario, r.expression_size, r.events, r.mean_ns, r.registers,
                         r.peak_buffer);
      rows.push_back({{"scenario", r.scenario},
                      {"expression_size", r.expression_size},
                      {"events", r.events},
                      {"mean_ns", r.mean_ns},
                      {"registers", r.registers},
                      {"peak_buffer", r.peak_buffer}});
      total += r.mean_ns;
    }
    step_ns = total / static_cast<double>(rs.size());
    params["events"] = events;
    report = {{"name", name}, {"rows", rows}};
  } else {  // nonconvergent
    const int k_max = 30;
    csv = "k,t,value\n";
    json rows = json::array();
    for (const auto& p : run_nonconvergent(k_max)) {
      csv += fmt::format("{},{},{}\n", p.k, p.t, p.value);
      rows.push_back({{"k", p.k}, {"t", p.t}, {"value", p.value}});
    }
    params["k_max"] = k_max;
    report = {{"name", name}, {"rows", rows}};
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  json manifest{{"experiment", name},
                {"seed", options.seed},
                {"parameters", params},
                {"wall_clock_seconds", wall},
                {"mean_step_ns", std::isfinite(step_ns) ? json(step_ns) : json(nullptr)},
                {"files", {"report.json", "series.csv", "manifest.json"}}};
  std::filesystem::path dir = std::filesystem::path(out_dir) / name;
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", report.dump(2) + "\n");
  write_file(dir / "series.csv", csv);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return report;
}

}  // namespace fairmon
