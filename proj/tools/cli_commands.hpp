#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmon/monitor.hpp"

namespace fairmon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitEvent = 3;

// Bad flags, unreadable files, invalid specs or models.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A stream line that is not a symbol of the alphabet.
struct EventError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { jsonl, csv };

struct MonitorArgs {
  std::string spec_path;
  std::string model_path;
  std::string input_path;  // empty or "-": standard input
  double delta = 0.05;
  std::string mode = "pointwise";
  std::string engine = "pomc";
  std::optional<double> tau_mix;
  std::uint64_t seed = 0;
  std::string format = "jsonl";
  std::int64_t stride = 1;
  bool intersect_uniform = false;
};

struct SimulateArgs {
  std::string model_path;
  std::int64_t steps = 1000;
  std::uint64_t seed = 0;
  std::string start = "initial";
};

struct TruthArgs {
  std::string model_path;
  std::string spec_path;
};

struct CompareBoundsArgs {
  double delta = 0.05;
  double sigma_sq = 1.0;
  std::int64_t t_min = 1;
  std::int64_t t_max = 1'000'000;
  int points = 61;
  std::vector<std::string> methods{"mc-pointwise", "mc-uniform", "poly-union", "exp-union"};
  std::optional<double> tau_mix;
  int arity = 1;
  std::string out_dir;
};

struct ExperimentArgs {
  std::vector<std::string> names;
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  int runs = 0;
  std::int64_t horizon = 0;
  double delta = 0.05;
};

int cmd_monitor(const MonitorArgs& args, std::istream& in, std::ostream& out);
int cmd_simulate(const SimulateArgs& args, std::ostream& out);
int cmd_truth(const TruthArgs& args, std::ostream& out);
int cmd_compare_bounds(const CompareBoundsArgs& args, std::ostream& out);
int cmd_experiment(const ExperimentArgs& args, std::ostream& out);

}  // namespace fairmon::cli
