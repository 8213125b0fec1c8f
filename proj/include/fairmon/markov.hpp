#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <string>
#include <vector>

#include "fairmon/expression.hpp"
#include "fairmon/rng.hpp"

namespace fairmon {

/// Finite POMC: states, row-stochastic transition matrix, initial
/// distribution and a total labelling. A bijective labelling makes it an MC.
struct ObservationModel {
  std::vector<std::string> states;
  Eigen::MatrixXd transition;
  Eigen::VectorXd initial;
  std::vector<Symbol> labels;  // labels[s] = observation of state s

  std::size_t size() const { return states.size(); }
  /// Throws ModelError unless rows and the initial vector are distributions
  /// (within 1e-9) and every state is labelled.
  void validate() const;
  bool fully_observed() const;
  /// Distinct labels in order of first appearance.
  Alphabet alphabet() const;
  int state_index(std::string_view name) const;
  /// State carrying `label`; only meaningful for fully observed models.
  int state_of_label(std::string_view label) const;
};

struct StationaryDistribution {
  Eigen::VectorXd pi;
  double residual = 0.0;  // ||pi M - pi||_1
};

struct MixingBound {
  double tau_mix = 1.0;
};

bool is_irreducible(const ObservationModel& m);

/// Period of an irreducible chain (1 means aperiodic).
int period(const ObservationModel& m);

/// Unique stationary distribution of an irreducible chain, from a direct
/// linear solve with a power-iteration fallback.
StationaryDistribution stationary_distribution(const ObservationModel& m);

/// min{t : max_s TV(delta_s M^t, pi) <= 1/4} for an irreducible aperiodic
/// chain. Throws ModelError past `max_steps`.
MixingBound mixing_time_bound(const ObservationModel& m, std::int64_t max_steps = 1'000'000);

enum class StartMode { initial, stationary };

/// Seeded sampler of observation streams.
class Simulator {
 public:
  Simulator(const ObservationModel& model, std::uint64_t seed, StartMode start = StartMode::initial);

  /// Advances one step and returns the new state index. The first call
  /// returns the start state.
  int next_state();
  const Symbol& next() { return model_->labels[static_cast<std::size_t>(next_state())]; }
  int state() const { return state_; }

 private:
  int sample(const std::vector<double>& cumulative, const std::vector<int>& targets);

  const ObservationModel* model_;
  SplitMix64 rng_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<std::vector<int>> targets_;
  std::vector<double> start_cumulative_;
  std::vector<int> start_targets_;
  int state_ = -1;
};

}  // namespace fairmon
