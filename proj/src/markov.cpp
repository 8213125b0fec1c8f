#include "fairmon/markov.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "fairmon/error.hpp"

namespace fairmon {

namespace {

constexpr double kStochasticTol = 1e-9;
constexpr double kResidualTol = 1e-10;

std::vector<std::vector<int>> successors(const ObservationModel& m, bool reverse) {
  auto n = static_cast<int>(m.size());
  std::vector<std::vector<int>> adj(m.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (m.transition(i, j) > 0.0) adj[static_cast<std::size_t>(reverse ? j : i)].push_back(reverse ? i : j);
    }
  }
  return adj;
}

std::vector<int> bfs_levels(const std::vector<std::vector<int>>& adj, int from) {
  std::vector<int> level(adj.size(), -1);
  std::deque<int> queue{from};
  level[static_cast<std::size_t>(from)] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (level[static_cast<std::size_t>(v)] < 0) {
        level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return level;
}

double residual_of(const ObservationModel& m, const Eigen::VectorXd& pi) {
  Eigen::RowVectorXd r = pi.transpose() * m.transition - pi.transpose();
  return r.lpNorm<1>();
}

Eigen::VectorXd normalised(Eigen::VectorXd v) {
  v = v.cwiseMax(0.0);
  double s = v.sum();
  if (s > 0) v /= s;
  return v;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> sparse_of(const Eigen::MatrixXd& dense) {
  return dense.sparseView();
}

}  // namespace

void ObservationModel::validate() const {
  const auto n = static_cast<Eigen::Index>(states.size());
  if (n == 0) throw ModelError("model has no states");
  if (transition.rows() != n || transition.cols() != n) {
    throw ModelError(fmt::format("transition matrix is {}x{} for {} states", transition.rows(), transition.cols(), n));
  }
  if (initial.size() != n) throw ModelError("initial distribution has the wrong length");
  if (labels.size() != states.size()) throw ModelError("every state needs a label");
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].empty()) throw ModelError("empty state name");
    if (labels[i].empty()) throw ModelError("state '" + states[i] + "' has an empty label");
    for (std::size_t j = 0; j < i; ++j) {
      if (states[i] == states[j]) throw ModelError("duplicate state '" + states[i] + "'");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double p = transition(i, j);
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw ModelError(fmt::format("transition ({},{}) = {} is not a probability", states[i], states[j], p));
      }
    }
    double row = transition.row(i).sum();
    if (std::abs(row - 1.0) > kStochasticTol) {
      throw ModelError(fmt::format("row '{}' sums to {}, not 1", states[static_cast<std::size_t>(i)], row));
    }
    if (!std::isfinite(initial(i)) || initial(i) < 0.0) throw ModelError("initial distribution has a negative entry");
  }
  if (std::abs(initial.sum() - 1.0) > kStochasticTol) {
    throw ModelError(fmt::format("initial distribution sums to {}, not 1", initial.sum()));
  }
}

bool ObservationModel::fully_observed() const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (labels[i] == labels[j]) return false;
    }
  }
  return true;
}

Alphabet ObservationModel::alphabet() const {
  std::vector<Symbol> out;
  for (const auto& l : labels) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  return Alphabet(std::move(out));
}

int ObservationModel::state_index(std::string_view name) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == name) return static_cast<int>(i);
  }
  throw ModelError("unknown state '" + std::string(name) + "'");
}

int ObservationModel::state_of_label(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  throw ModelError("no state is labelled '" + std::string(label) + "'");
}

bool is_irreducible(const ObservationModel& m) {
  auto fwd = bfs_levels(successors(m, false), 0);
  auto bwd = bfs_levels(successors(m, true), 0);
  auto reached = [](int l) { return l >= 0; };
  return std::all_of(fwd.begin(), fwd.end(), reached) && std::all_of(bwd.begin(), bwd.end(), reached);
}

int period(const ObservationModel& m) {
  if (!is_irreducible(m)) throw ModelError("period is only defined here for irreducible chains");
  auto adj = successors(m, false);
  auto level = bfs_levels(adj, 0);
  int g = 0;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    for (int v : adj[u]) g = std::gcd(g, std::abs(level[u] + 1 - level[static_cast<std::size_t>(v)]));
  }
  return g;
}

StationaryDistribution stationary_distribution(const ObservationModel& m) {
  if (!is_irreducible(m)) throw ModelError("chain is reducible; the stationary distribution is not unique");
  const auto n = static_cast<Eigen::Index>(m.size());
  StationaryDistribution out;
  if (n <= 2000) {
    // (M^T - I) pi = 0 with one equation replaced by sum(pi) = 1.
    Eigen::MatrixXd a = m.transition.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    out.pi = normalised(a.partialPivLu().solve(rhs));
    out.residual = residual_of(m, out.pi);
    if (out.residual <= kResidualTol) return out;
  } else {
    out.pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  }
  // Power iteration on the lazy chain (I + M) / 2, which shares pi and is aperiodic.
  auto sparse = sparse_of(m.transition);
  Eigen::RowVectorXd v = out.pi.transpose();
  for (int it = 0; it < 10'000'000; ++it) {
    Eigen::RowVectorXd next = 0.5 * (v + v * sparse);
    next /= next.sum();
    v = next;
    if (it % 64 == 0 && residual_of(m, v.transpose()) <= kResidualTol) break;
  }
  out.pi = normalised(v.transpose());
  out.residual = residual_of(m, out.pi);
  if (out.residual > kResidualTol) {
    throw ModelError(fmt::format("stationary distribution did not converge (residual {})", out.residual));
  }
  return out;
}

MixingBound mixing_time_bound(const ObservationModel& m, std::int64_t max_steps) {
  if (!is_irreducible(m)) throw ModelError("mixing time needs an irreducible chain");
  if (int p = period(m); p != 1) throw ModelError(fmt::format("chain is periodic with period {}", p));
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::RowVectorXd pi = stationary_distribution(m).pi.transpose();
  auto sparse = sparse_of(m.transition);
  std::int64_t worst = 0;
  const Eigen::Index block = std::min<Eigen::Index>(n, 256);
  for (Eigen::Index start = 0; start < n; start += block) {
    Eigen::Index rows = std::min(block, n - start);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows, n);
    for (Eigen::Index r = 0; r < rows; ++r) d(r, start + r) = 1.0;
    std::int64_t t = 0;
    for (;;) {
      ++t;
      d = d * sparse;
      double tv = ((d.rowwise() - pi).cwiseAbs().rowwise().sum() * 0.5).maxCoeff();
      if (tv <= 0.25) break;
      if (t >= max_steps) throw ModelError(fmt::format("chain did not mix within {} steps", max_steps));
    }
    worst = std::max(worst, t);
  }
  return {static_cast<double>(std::max<std::int64_t>(worst, 1))};
}

Simulator::Simulator(const ObservationModel& model, std::uint64_t seed, StartMode start)
    : model_(&model), rng_(seed) {
  model.validate();
  const auto n = static_cast<Eigen::Index>(model.size());
  cumulative_.resize(model.size());
  targets_.resize(model.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double p = model.transition(i, j);
      if (p > 0.0) {
        acc += p;
        cumulative_[static_cast<std::size_t>(i)].push_back(acc);
        targets_[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
      }
    }
  }
  Eigen::VectorXd init = start == StartMode::stationary ? stationary_distribution(model).pi : model.initial;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (init(j) > 0.0) {
      acc += init(j);
      start_cumulative_.push_back(acc);
      start_targets_.push_back(static_cast<int>(j));
    }
  }
}

int Simulator::sample(const std::vector<double>& cumulative, const std::vector<int>& targets) {
  double u = rng_.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return targets[static_cast<std::size_t>(it - cumulative.begin())];
}

int Simulator::next_state() {
  if (state_ < 0) {
    state_ = sample(start_cumulative_, start_targets_);
  } else {
    auto s = static_cast<std::size_t>(state_);
    state_ = sample(cumulative_[s], targets_[s]);
  }
  return state_;
}

}  // namespace fairmon
