#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

#include "fairmon/mc_monitor.hpp"
#include "fairmon/pomc_monitor.hpp"

namespace fairmon {

enum class Engine { mc, pomc };

struct MonitorConfig {
  Engine engine = Engine::pomc;
  double delta = 0.05;
  Soundness mode = Soundness::pointwise;
  double tau_mix = 1.0;
  std::uint64_t seed = 0;
  bool intersect_uniform = false;
};

/// Either engine behind one interface.
class Monitor {
 public:
  Monitor(const Expression& e, const Alphabet& alphabet, const MonitorConfig& config)
      : impl_(make(e, alphabet, config)) {}

  Verdict next(int symbol) {
    return std::visit([&](auto& m) { return m.next(symbol); }, impl_);
  }
  Verdict next(std::string_view symbol) {
    return std::visit([&](auto& m) { return m.next(symbol); }, impl_);
  }

  const Alphabet& alphabet() const {
    return std::visit([](const auto& m) -> const Alphabet& { return m.alphabet(); }, impl_);
  }
  const PomcMonitor* pomc() const { return std::get_if<PomcMonitor>(&impl_); }
  const PseMonitor* mc() const { return std::get_if<PseMonitor>(&impl_); }

 private:
  using Impl = std::variant<PomcMonitor, PseMonitor>;

  static Impl make(const Expression& e, const Alphabet& alphabet, const MonitorConfig& c) {
    if (c.engine == Engine::mc) {
      return Impl(std::in_place_type<PseMonitor>, e, alphabet, McOptions{c.delta, c.mode, c.seed, {}});
    }
    return Impl(std::in_place_type<PomcMonitor>, e, alphabet,
                PomcOptions{c.delta, c.mode, c.tau_mix, c.intersect_uniform});
  }

  Impl impl_;
};

}  // namespace fairmon
