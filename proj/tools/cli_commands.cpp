#include "cli_commands.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fairmon/bounds.hpp"
#include "fairmon/error.hpp"
#include "fairmon/experiments.hpp"
#include "fairmon/model_io.hpp"
#include "fairmon/oracle.hpp"
#include "fairmon/parser.hpp"

namespace fairmon::cli {

namespace {

std::string read_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(fmt::format("missing --{}", what));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read {} file '{}'", what, path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Specification load_spec(const std::string& path) {
  std::string text = read_file(path, "spec");
  try {
    return parse_specification(text);
  } catch (const Error& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

ObservationModel load_model_or_config_error(const std::string& path) {
  std::string text = read_file(path, "model");
  try {
    return model_from_json(text);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

Soundness parse_mode(const std::string& s) {
  if (s == "pointwise") return Soundness::pointwise;
  if (s == "uniform") return Soundness::uniform;
  throw ConfigError(fmt::format("--mode must be pointwise or uniform, got '{}'", s));
}

Engine parse_engine(const std::string& s) {
  if (s == "mc") return Engine::mc;
  if (s == "pomc") return Engine::pomc;
  throw ConfigError(fmt::format("--engine must be mc or pomc, got '{}'", s));
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError(fmt::format("--delta must lie in (0,1), got {}", delta));
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\v\f";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

void append_number(std::string& buf, double x, bool json) {
  if (std::isfinite(x)) {
    fmt::format_to(std::back_inserter(buf), "{}", x);
  } else if (json) {
    buf += "null";
  }
}

}  // namespace

int cmd_monitor(const MonitorArgs& args, std::istream& in, std::ostream& out) {
  check_delta(args.delta);
  if (args.stride < 1) throw ConfigError("--stride must be positive");
  Format format;
  if (args.format == "jsonl") {
    format = Format::jsonl;
  } else if (args.format == "csv") {
    format = Format::csv;
  } else {
    throw ConfigError(fmt::format("--format must be jsonl or csv, got '{}'", args.format));
  }
  MonitorConfig config;
  config.engine = parse_engine(args.engine);
  config.mode = parse_mode(args.mode);
  config.delta = args.delta;
  config.seed = args.seed;
  config.intersect_uniform = args.intersect_uniform;

  Specification spec = load_spec(args.spec_path);
  std::optional<ObservationModel> model;
  if (!args.model_path.empty()) model = load_model_or_config_error(args.model_path);

  Alphabet alphabet = spec.alphabet;
  if (model) {
    Alphabet from_model = model->alphabet();
    if (alphabet.size() == 0) {
      alphabet = from_model;
    } else {
      for (const auto& s : from_model.symbols()) {
        if (!alphabet.contains(s)) {
          throw ConfigError(fmt::format("model label '{}' is missing from the alphabet declared in --spec", s));
        }
      }
    }
  }
  if (alphabet.size() == 0) throw ConfigError("no alphabet: add an 'alphabet:' line to the --spec file or pass --model");

  if (config.engine == Engine::pomc) {
    if (args.tau_mix) {
      config.tau_mix = *args.tau_mix;
    } else if (model) {
      try {
        config.tau_mix = mixing_time_bound(*model).tau_mix;
      } catch (const Error& e) {
        throw ConfigError(fmt::format("cannot compute the mixing time: {}", e.what()));
      }
    } else {
      throw ConfigError("--tau-mix is required for the pomc engine (or pass --model to compute it)");
    }
    if (!(config.tau_mix >= 1.0) || !std::isfinite(config.tau_mix)) throw ConfigError("--tau-mix must be at least 1");
  } else if (model && !model->fully_observed()) {
    throw ConfigError("the mc engine needs a fully observed model");
  }

  std::optional<Monitor> monitor;
  try {
    monitor.emplace(spec.property, alphabet, config);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  if (format == Format::csv) out << "t,lo,hi,point,verdict\n";
  std::string line;
  std::string buf;
  std::int64_t line_no = 0;
  std::int64_t t = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sym = trim(line);
    if (sym.empty()) continue;
    auto id = alphabet.find(sym);
    if (!id) throw EventError(fmt::format("line {}: unknown symbol '{}'", line_no, sym));
    Verdict v = monitor->next(*id);
    ++t;
    if (t % args.stride != 0) continue;
    const bool json = format == Format::jsonl;
    double lo = v.is_bounded() ? v.interval.lo : NAN;
    double hi = v.is_bounded() ? v.interval.hi : NAN;
    if (json) {
      fmt::format_to(std::back_inserter(buf), "{{\"t\":{},\"lo\":", t);
      append_number(buf, lo, true);
      buf += ",\"hi\":";
      append_number(buf, hi, true);
      buf += ",\"point\":";
      append_number(buf, v.point, true);
      fmt::format_to(std::back_inserter(buf), ",\"verdict\":\"{}\"}}\n", to_string(v.kind));
    } else {
      fmt::format_to(std::back_inserter(buf), "{},", t);
      append_number(buf, lo, false);
      buf += ',';
      append_number(buf, hi, false);
      buf += ',';
      append_number(buf, v.point, false);
      fmt::format_to(std::back_inserter(buf), ",{}\n", to_string(v.kind));
    }
    if (buf.size() > (1 << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  out.flush();
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  if (args.steps < 0) throw ConfigError("--steps must be nonnegative");
  StartMode start;
  if (args.start == "initial") {
    start = StartMode::initial;
  } else if (args.start == "stationary") {
    start = StartMode::stationary;
  } else {
    throw ConfigError(fmt::format("--start must be initial or stationary, got '{}'", args.start));
  }
  ObservationModel model = load_model_or_config_error(args.model_path);
  std::optional<Simulator> sim;
  try {
    sim.emplace(model, args.seed, start);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  std::string buf;
  for (std::int64_t i = 0; i < args.steps; ++i) {
    buf += sim->next();
    buf += '\n';
    if (buf.size() > (1 << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  out.flush();
  return kExitOk;
}

int cmd_truth(const TruthArgs& args, std::ostream& out) {
  ObservationModel model = load_model_or_config_error(args.model_path);
  Specification spec = load_spec(args.spec_path);
  double v = 0.0;
  try {
    v = truth_value(model, spec.property);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  out << fmt::format("{:.12g}\n", v);
  return kExitOk;
}

int cmd_compare_bounds(const CompareBoundsArgs& args, std::ostream& out) {
  check_delta(args.delta);
  if (!(args.sigma_sq > 0.0)) throw ConfigError("--sigma-sq must be positive");
  if (args.t_min < 1 || args.t_max < args.t_min) throw ConfigError("need 1 <= --t-min <= --t-max");
  if (args.points < 1) throw ConfigError("--points must be positive");
  static const std::vector<std::string> known{"mc-pointwise", "mc-uniform", "poly-union",
                                              "exp-union",    "pomc-pointwise", "pomc-uniform"};
  for (const auto& m : args.methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw ConfigError(fmt::format("unknown method '{}'", m));
    }
    if (m.rfind("pomc", 0) == 0 && !args.tau_mix) throw ConfigError("pomc methods need --tau-mix");
  }
  if (args.arity < 1) throw ConfigError("--arity must be positive");

  std::vector<std::int64_t> ts;
  double lmin = std::log10(static_cast<double>(args.t_min));
  double lmax = std::log10(static_cast<double>(args.t_max));
  for (int i = 0; i < args.points; ++i) {
    double x = args.points == 1 ? lmax : lmin + (lmax - lmin) * i / (args.points - 1);
    auto t = std::clamp<std::int64_t>(std::llround(std::pow(10.0, x)), args.t_min, args.t_max);
    if (ts.empty() || ts.back() != t) ts.push_back(t);
  }

  std::string csv = "t";
  for (const auto& m : args.methods) csv += "," + m;
  csv += '\n';
  for (auto t : ts) {
    csv += std::to_string(t);
    for (const auto& m : args.methods) {
      double v = NAN;
      if (m == "mc-pointwise") {
        v = ci_mc_pointwise(t, args.delta, args.sigma_sq);
      } else if (m == "mc-uniform") {
        v = ci_mc_uniform(t, args.delta, args.sigma_sq);
      } else if (m == "poly-union") {
        v = naive_uniform_lift(args.delta, t, LiftScaling::polynomial, args.sigma_sq);
      } else if (m == "exp-union") {
        v = naive_uniform_lift(args.delta, t, LiftScaling::exponential, args.sigma_sq);
      } else if (t >= args.arity) {
        double b = std::sqrt(args.sigma_sq);
        v = m == "pomc-pointwise" ? ci_pomc_pointwise(args.delta, t, args.arity, 0.0, b, *args.tau_mix)
                                  : ci_pomc_uniform(args.delta, t, args.arity, 0.0, b, *args.tau_mix);
      }
      csv += ',';
      if (std::isfinite(v)) csv += fmt::format("{}", v);
    }
    csv += '\n';
  }
  if (args.out_dir.empty()) {
    out << csv;
  } else {
    std::filesystem::create_directories(args.out_dir);
    auto path = std::filesystem::path(args.out_dir) / "compare-bounds.csv";
    std::ofstream f(path);
    if (!f) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    f << csv;
    out << path.string() << '\n';
  }
  return kExitOk;
}

int cmd_experiment(const ExperimentArgs& args, std::ostream& out) {
  check_delta(args.delta);
  if (args.names.empty()) throw ConfigError("name an experiment or 'all'");
  std::vector<std::string> names;
  for (const auto& n : args.names) {
    if (n == "all") {
      names.insert(names.end(), experiment_names().begin(), experiment_names().end());
      continue;
    }
    const auto& known = experiment_names();
    if (std::find(known.begin(), known.end(), n) == known.end()) {
      throw ConfigError(fmt::format("unknown experiment '{}'; expected one of: {}, all", n, fmt::join(known, ", ")));
    }
    names.push_back(n);
  }
  ExperimentOptions opts;
  opts.seed = args.seed;
  opts.runs = args.runs;
  opts.horizon = args.horizon;
  opts.delta = args.delta;
  for (const auto& n : names) {
    run_experiment(n, args.out_dir, opts);
    out << (std::filesystem::path(args.out_dir) / n).string() << '\n';
  }
  return kExitOk;
}

}  // namespace fairmon::cli
