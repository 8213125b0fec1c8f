#include "fairmon/mc_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairmon/error.hpp"

namespace fairmon {

namespace {

constexpr double kBottom = std::numeric_limits<double>::quiet_NaN();

}  // namespace

ReshufflePool::ReshufflePool(std::vector<int> targets) : targets_(std::move(targets)), counts_(targets_.size(), 0) {}

void ReshufflePool::record(int symbol) {
  ++total_;
  auto it = std::lower_bound(targets_.begin(), targets_.end(), symbol);
  if (it != targets_.end() && *it == symbol) ++counts_[static_cast<std::size_t>(it - targets_.begin())];
}

std::optional<int> ReshufflePool::draw(SplitMix64& rng) {
  if (total_ == 0) return std::nullopt;
  std::uint64_t r = rng.below(total_);
  --total_;
  for (std::size_t j = 0; j < targets_.size(); ++j) {
    if (r < counts_[j]) {
      --counts_[j];
      return targets_[j];
    }
    r -= counts_[j];
  }
  return kTop;
}

std::uint64_t ReshufflePool::count(int symbol) const {
  auto it = std::lower_bound(targets_.begin(), targets_.end(), symbol);
  if (it == targets_.end() || *it != symbol) return 0;
  return counts_[static_cast<std::size_t>(it - targets_.begin())];
}

bool ReshufflePool::consistent() const {
  std::uint64_t s = 0;
  for (auto c : counts_) s += c;
  return s <= total_;
}

DivisionFreeMonitor::DivisionFreeMonitor(const Expression& e, const Alphabet& alphabet, const McOptions& options)
    : pse_(e, alphabet), delta_(options.delta), mode_(options.mode), rng_(options.seed) {
  if (!(delta_ > 0.0 && delta_ < 1.0)) throw DomainError("delta must lie in (0,1)");
  RangeResult r = expr_range(pse_, options.range);
  range_ = r.range;
  exhaustive_ = r.exhaustive;
  sigma_sq_ = range_.width() * range_.width();
  constant_ = pse_.leaf_count() == 0;
  for (const auto& s : pse_.sources()) {
    pools_.emplace_back(s.targets);
    z_.emplace_back();
    z_.back().reserve(static_cast<std::size_t>(s.slots));
  }
  memo_.assign(pse_.nodes().size(), 0.0);
  memo_set_.assign(pse_.nodes().size(), 0);
  if (constant_) {
    mean_ = pse_.evaluate({});
  }
}

double DivisionFreeMonitor::eval(int index) {
  auto i = static_cast<std::size_t>(index);
  if (memo_set_[i]) return memo_[i];
  const auto& n = pse_.nodes()[i];
  double v = 0.0;
  switch (n.kind) {
    case NodeKind::constant:
      v = n.value;
      break;
    case NodeKind::transition: {
      auto s = static_cast<std::size_t>(n.source);
      auto k = static_cast<std::size_t>(n.slot);
      auto& z = z_[s];
      while (z.size() <= k) {
        auto d = pools_[s].draw(rng_);
        if (!d) return kBottom;
        z.push_back(*d);
      }
      peak_buffer_ = std::max(peak_buffer_, z.size());
      v = z[k] == n.target ? 1.0 : 0.0;
      break;
    }
    default: {
      // Both children are evaluated even if one is undefined, so the draws
      // of the other are kept for this round.
      double l = eval(n.lhs);
      double r = eval(n.rhs);
      if (std::isnan(l) || std::isnan(r)) return kBottom;
      switch (n.kind) {
        case NodeKind::add: v = l + r; break;
        case NodeKind::sub: v = l - r; break;
        default: v = l * r; break;
      }
    }
  }
  memo_[i] = v;
  memo_set_[i] = 1;
  return v;
}

void DivisionFreeMonitor::reset_round() {
  for (auto& z : z_) z.clear();
  std::fill(memo_set_.begin(), memo_set_.end(), 0);
}

Verdict DivisionFreeMonitor::current() const {
  if (constant_) return Verdict::bounded(Interval::point(mean_), mean_);
  if (samples_ == 0) return Verdict::inconclusive();
  return Verdict::bounded(clip({mean_ - eps_, mean_ + eps_}, range_), mean_);
}

Verdict DivisionFreeMonitor::next(int symbol) {
  last_outcome_.reset();
  if (constant_) return current();
  if (prev_ >= 0) {
    int s = pse_.source_of(prev_);
    if (s >= 0) pools_[static_cast<std::size_t>(s)].record(symbol);
  }
  prev_ = symbol;
  double w = eval(static_cast<int>(pse_.nodes().size()) - 1);
  if (!std::isnan(w)) {
    ++samples_;
    mean_ += (w - mean_) / static_cast<double>(samples_);
    eps_ = ci_mc(mode_, samples_, delta_, sigma_sq_);
    last_outcome_ = w;
    reset_round();
  }
  return current();
}

bool DivisionFreeMonitor::counters_consistent() const {
  return std::all_of(pools_.begin(), pools_.end(), [](const ReshufflePool& p) { return p.consistent(); });
}

PseMonitor::PseMonitor(const Expression& e, Alphabet alphabet, const McOptions& options)
    : alphabet_(std::move(alphabet)) {
  Expression lowered = erase_labels(lower_conditionals(e));
  if (!is_pse(lowered)) {
    throw NormalFormError("the MC engine needs a PSE over transition variables; use the POMC engine for " +
                          to_string(e));
  }
  if (is_division_free(lowered)) {
    decomposition_.a = PolynomialForm{};
    parts_.emplace_back(lowered, alphabet_, options);
    return;
  }
  decomposition_ = decompose_division(to_polynomial(lowered));
  McOptions part = options;
  part.delta = division_part_delta(options.delta);
  const Expression exprs[3] = {decomposition_.phi_a(), decomposition_.phi_b(), decomposition_.phi_c()};
  for (std::uint64_t k = 0; k < 3; ++k) {
    part.seed = SplitMix64::derive(options.seed, k);
    parts_.emplace_back(exprs[k], alphabet_, part);
  }
}

Verdict PseMonitor::next(std::string_view symbol) { return next(alphabet_.id(symbol)); }

Verdict PseMonitor::next(int symbol) {
  if (symbol < 0 || static_cast<std::size_t>(symbol) >= alphabet_.size()) throw SymbolError("symbol id out of range");
  ++t_;
  if (parts_.size() == 1) return parts_[0].next(symbol);
  Verdict v[3];
  for (std::size_t k = 0; k < 3; ++k) v[k] = parts_[k].next(symbol);
  for (const auto& x : v) {
    if (x.is_inconclusive()) return Verdict::inconclusive();
  }
  double point = v[0].point + v[1].point / v[2].point;
  Interval out = v[0].interval + v[1].interval / v[2].interval;
  if (!out.is_bounded()) return Verdict::unbounded(point);
  return Verdict::bounded(out, point);
}

}  // namespace fairmon
