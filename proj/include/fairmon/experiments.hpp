#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmon/markov.hpp"
#include "fairmon/monitor.hpp"

namespace fairmon {

// --- Model generators --------------------------------------------------------

/// Lazy random walk on {0,1}^n: stay with probability 1/2, otherwise flip a
/// uniformly chosen bit. States are bit strings; label "a" when the first bit
/// is 0 and "b" otherwise.
ObservationModel hypercube_model(int n);

/// a a - b b over the hypercube labels.
Expression hypercube_tdp();

struct LendingMcParams {
  double p_group = 0.5;     // init -> g
  double p_grant_g = 0.8;   // g -> gy
  double p_grant_ng = 0.6;  // ng -> ngy
  double repay_g = 0.9;     // gy -> z
  double repay_ng = 0.8;    // ngy -> z
};

/// Fully observed lending chain over init, g, ng, gy, ngy, ny, z, nz.
ObservationModel lending_mc(const LendingMcParams& p = {});
/// T[g->gy] - T[ng->ngy].
Expression lending_demographic_parity();
/// T[g->gy] * T[gy->z] - T[ng->ngy] * T[ngy->z].
Expression lending_equal_opportunity();

struct AdmissionParams {
  int levels = 4;  // investment levels 0..levels
  double p_group = 0.5;
  std::vector<double> invest_g;   // default: increasing in the level
  std::vector<double> invest_ng;  // default: decreasing in the level
};

/// Fully observed admission chain: init -> {g, ng} -> {0..N} -> init.
ObservationModel admission_mc(const AdmissionParams& p = {});
/// sum_k k T[g->k] - sum_k k T[ng->k].
Expression admission_social_burden(int levels = 4);

struct LendingPomcParams {
  double self_loop = 0.2;  // S -> S, keeps the chain aperiodic
  double p_a = 0.5;
  double high_a = 0.5;  // P(credit level 2 | group A)
  double high_b = 0.3;
  double grant_a1 = 0.5, grant_a2 = 0.9, grant_b1 = 0.4, grant_b2 = 0.8;
};

/// Partially observed lending chain: S, (A,1), (A,2), (B,1), (B,2), Y, N with
/// credit levels hidden behind the group labels A and B.
ObservationModel lending_pomc(const LendingPomcParams& p = {});
/// P[Y | A] - P[Y | B].
Expression lending_pomc_demographic_parity();

// --- Drivers -----------------------------------------------------------------

struct CoverageConfig {
  std::string name;
  ObservationModel model;
  Expression spec = 0.0;
  MonitorConfig monitor;
  int runs = 100;
  std::int64_t horizon = 100'000;
  std::uint64_t seed = 1;
  StartMode start = StartMode::stationary;
  std::vector<std::int64_t> checkpoints;  // horizon is always included
  unsigned threads = 0;                   // 0: hardware concurrency
};

struct CheckpointRow {
  std::int64_t t = 0;
  double truth = 0.0;
  double mean_point = 0.0;
  double min_point = 0.0;
  double max_point = 0.0;
  double min_lo = 0.0;  // over bounded verdicts; NaN if none
  double max_hi = 0.0;
  double mean_half_width = 0.0;
  int covered = 0;  // verdict consistent with the truth
  int bounded = 0;  // verdict was a bounded interval
};

struct CoverageReport {
  std::string name;
  std::uint64_t seed = 0;
  int runs = 0;
  std::int64_t horizon = 0;
  double truth = 0.0;
  std::vector<CheckpointRow> rows;
  int covered_at_horizon = 0;
  int bounded_at_horizon = 0;
  int covered_all_steps = 0;  // runs whose every verdict was consistent
  double mean_step_ns = 0.0;
  double min_step_ns = 0.0;  // per-run means
  double max_step_ns = 0.0;
};

CoverageReport run_coverage(const CoverageConfig& config);

struct NonconvergentPoint {
  int k = 0;              // block index: floor(log2 t) of the block just completed
  std::int64_t t = 0;     // 2^(k+1) - 1
  double value = 0.0;     // running mean of w_1..w_t
};

/// Running means of w_t = 1 iff floor(log2 t) is odd, at the end of each
/// block k = 0..k_max-1.
std::vector<NonconvergentPoint> run_nonconvergent(int k_max);

struct TimingResult {
  std::string scenario;
  std::size_t expression_size = 0;
  std::int64_t events = 0;
  double mean_ns = 0.0;
  std::size_t registers = 0;
  std::size_t peak_buffer = 0;
};

/// Mean per-event monitor update latency over `events` simulated events.
TimingResult time_monitor(const std::string& scenario, const ObservationModel& model, const Expression& spec,
                          const MonitorConfig& config, std::int64_t events, std::uint64_t seed);

/// Names accepted by run_experiment.
const std::vector<std::string>& experiment_names();

struct ExperimentOptions {
  std::uint64_t seed = 1;
  int runs = 0;              // 0: per-experiment default
  std::int64_t horizon = 0;  // 0: per-experiment default
  double delta = 0.05;
};

/// Runs a named experiment and writes <out_dir>/<name>/{report.json,
/// series.csv, manifest.json}. Returns the report. Throws Error for unknown
/// names.
nlohmann::json run_experiment(const std::string& name, const std::string& out_dir, const ExperimentOptions& options);

nlohmann::json to_json(const CoverageReport& r);

}  // namespace fairmon
