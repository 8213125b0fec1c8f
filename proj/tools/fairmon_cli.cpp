#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "cli_commands.hpp"
#include "fairmon/error.hpp"

using namespace fairmon::cli;

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  CLI::App app{"fairmon: runtime monitors for quantitative fairness properties of Markov chains"};
  app.require_subcommand(1);

  MonitorArgs mon;
  auto* monitor = app.add_subcommand("monitor", "Read one symbol per line and print a verdict per event");
  monitor->add_option("--spec", mon.spec_path, "Specification file")->required();
  monitor->add_option("--model", mon.model_path, "Model JSON (alphabet and mixing time)");
  monitor->add_option("--input", mon.input_path, "Event file (default: standard input)");
  monitor->add_option("--delta", mon.delta, "Failure probability")->capture_default_str();
  monitor->add_option("--mode", mon.mode, "pointwise | uniform")->capture_default_str();
  monitor->add_option("--engine", mon.engine, "pomc | mc")->capture_default_str();
  monitor->add_option("--tau-mix", mon.tau_mix, "Mixing time bound (pomc engine)");
  monitor->add_option("--seed", mon.seed, "Seed for the reshuffling (mc engine)")->capture_default_str();
  monitor->add_option("--format", mon.format, "jsonl | csv")->capture_default_str();
  monitor->add_option("--stride", mon.stride, "Print every k-th verdict")->capture_default_str();
  monitor->add_flag("--intersect", mon.intersect_uniform, "Running intersection of uniform verdicts (pomc)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Print a simulated observation stream");
  simulate->add_option("--model", sim.model_path, "Model JSON")->required();
  simulate->add_option("--steps", sim.steps, "Number of events")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Seed")->capture_default_str();
  simulate->add_option("--start", sim.start, "initial | stationary")->capture_default_str();

  TruthArgs tr;
  auto* truth = app.add_subcommand("truth", "Print the exact value of a property on a model");
  truth->add_option("--model", tr.model_path, "Model JSON")->required();
  truth->add_option("--spec", tr.spec_path, "Specification file")->required();

  CompareBoundsArgs cb;
  auto* compare = app.add_subcommand("compare-bounds", "Tabulate confidence half-widths over t");
  compare->add_option("--delta", cb.delta, "Failure probability")->capture_default_str();
  compare->add_option("--sigma-sq", cb.sigma_sq, "Squared range of the outcome")->capture_default_str();
  compare->add_option("--t-min", cb.t_min)->capture_default_str();
  compare->add_option("--t-max", cb.t_max)->capture_default_str();
  compare->add_option("--points", cb.points, "Log-spaced grid size")->capture_default_str();
  compare->add_option("--methods", cb.methods, "mc-pointwise mc-uniform poly-union exp-union pomc-pointwise pomc-uniform")
      ->delimiter(',');
  compare->add_option("--tau-mix", cb.tau_mix, "Mixing time bound for the pomc methods");
  compare->add_option("--arity", cb.arity, "Window length for the pomc methods")->capture_default_str();
  compare->add_option("--out-dir", cb.out_dir, "Write compare-bounds.csv here instead of standard output");

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run named experiments and write CSV/JSON results");
  experiment->add_option("name", ex.names, "Experiment name(s) or 'all'")->required();
  experiment->add_option("--seed", ex.seed, "Seed")->capture_default_str();
  experiment->add_option("--out-dir", ex.out_dir, "Output directory")->capture_default_str();
  experiment->add_option("--runs", ex.runs, "Override the number of runs");
  experiment->add_option("--horizon", ex.horizon, "Override the horizon / event count");
  experiment->add_option("--delta", ex.delta, "Failure probability")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*monitor) {
      if (mon.input_path.empty() || mon.input_path == "-") return cmd_monitor(mon, std::cin, std::cout);
      std::ifstream in(mon.input_path);
      if (!in) throw ConfigError("cannot read input file '" + mon.input_path + "'");
      return cmd_monitor(mon, in, std::cout);
    }
    if (*simulate) return cmd_simulate(sim, std::cout);
    if (*truth) return cmd_truth(tr, std::cout);
    if (*compare) return cmd_compare_bounds(cb, std::cout);
    if (*experiment) return cmd_experiment(ex, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "fairmon: " << e.what() << '\n';
    return kExitConfig;
  } catch (const EventError& e) {
    std::cout.flush();
    std::cerr << "fairmon: " << e.what() << '\n';
    return kExitEvent;
  } catch (const fairmon::Error& e) {
    std::cerr << "fairmon: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "fairmon: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
