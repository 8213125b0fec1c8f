#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "fairmon/error.hpp"
#include "fairmon/experiments.hpp"
#include "fairmon/model_io.hpp"
#include "fairmon/oracle.hpp"
#include "fairmon/parser.hpp"
#include "fairmon/rng.hpp"

using namespace fairmon;

namespace {

ObservationModel chain(std::vector<std::string> states, std::vector<std::vector<double>> rows) {
  ObservationModel m;
  auto n = static_cast<Eigen::Index>(states.size());
  m.labels = states;
  m.states = std::move(states);
  m.transition.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m.transition(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  m.initial = Eigen::VectorXd::Zero(n);
  m.initial(0) = 1.0;
  return m;
}

ObservationModel three_state() {
  return chain({"1", "2", "3"}, {{0.2, 0.3, 0.5}, {0.5, 0.25, 0.25}, {0.6, 0.2, 0.2}});
}

}  // namespace

TEST_CASE("SplitMix64 reference outputs and bounded draws") {
  SplitMix64 g(0);
  // reference sequence of splitmix64 seeded with 0
  CHECK(g() == 0xe220a8397b1dcdafULL);
  CHECK(g() == 0x6e789e6aa1b965f4ULL);
  CHECK(g() == 0x06c45d188009454fULL);
  SplitMix64 h(42);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) ++counts[h.below(3)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
  for (int i = 0; i < 1000; ++i) {
    double u = h.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(SplitMix64::derive(7, 0) != SplitMix64::derive(7, 1));
  CHECK(SplitMix64::derive(7, 3) == SplitMix64::derive(7, 3));
}

TEST_CASE("model validation") {
  ObservationModel ok = chain({"a", "b"}, {{0.5, 0.5}, {1.0, 0.0}});
  CHECK_NOTHROW(ok.validate());
  ObservationModel bad_row = chain({"a", "b"}, {{0.5, 0.4}, {1.0, 0.0}});
  CHECK_THROWS_AS(bad_row.validate(), ModelError);
  ObservationModel negative = chain({"a", "b"}, {{1.5, -0.5}, {1.0, 0.0}});
  CHECK_THROWS_AS(negative.validate(), ModelError);
  ObservationModel dup = chain({"a", "a"}, {{0.5, 0.5}, {1.0, 0.0}});
  CHECK_THROWS_AS(dup.validate(), ModelError);
}

TEST_CASE("stationary distribution of a two-state chain") {
  ObservationModel m = chain({"a", "b"}, {{0.9, 0.1}, {0.2, 0.8}});
  StationaryDistribution s = stationary_distribution(m);
  CHECK(s.pi(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.pi(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.residual <= 1e-10);
  CHECK(is_irreducible(m));
  CHECK(period(m) == 1);
}

TEST_CASE("stationary distribution on a large chain goes through the iterative path") {
  const int n = 2500;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  ObservationModel m;
  for (int i = 0; i < n; ++i) m.states.push_back("s" + std::to_string(i));
  m.labels = m.states;
  m.transition = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m.transition(i, (i + 1) % n) += 0.5;
    for (int k = 0; k < 4; ++k) m.transition(i, pick(rng)) += 0.125;
  }
  m.initial = Eigen::VectorXd::Constant(n, 1.0 / n);
  m.validate();
  StationaryDistribution s = stationary_distribution(m);
  CHECK(s.residual <= 1e-10);
  CHECK(s.pi.sum() == doctest::Approx(1.0));
  CHECK(s.pi.minCoeff() > 0.0);
}

TEST_CASE("reducible and periodic chains") {
  ObservationModel red = chain({"a", "b"}, {{1.0, 0.0}, {0.5, 0.5}});
  CHECK_FALSE(is_irreducible(red));
  CHECK_THROWS_AS(stationary_distribution(red), ModelError);
  ObservationModel cyc = chain({"a", "b"}, {{0.0, 1.0}, {1.0, 0.0}});
  CHECK(period(cyc) == 2);
  CHECK_THROWS_AS(mixing_time_bound(cyc), ModelError);
  CHECK(period(admission_mc()) == 3);
}

TEST_CASE("hypercube generator") {
  ObservationModel h = hypercube_model(3);
  CHECK(h.size() == 8);
  for (Eigen::Index i = 0; i < 8; ++i) CHECK(h.transition.row(i).sum() == doctest::Approx(1.0));
  StationaryDistribution s = stationary_distribution(h);
  for (Eigen::Index i = 0; i < 8; ++i) CHECK(s.pi(i) == doctest::Approx(0.125));
  double tau = mixing_time_bound(h).tau_mix;
  // the coupling bound n (ln n + ln 4) ~ 7.45 dominates the exact mixing time
  CHECK(tau >= 1.0);
  CHECK(tau <= 3.0 * (std::log(3.0) + std::log(4.0)));
  CHECK(truth_value(h, hypercube_tdp()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mixing time of a fast chain") {
  ObservationModel iid = chain({"a", "b"}, {{0.5, 0.5}, {0.5, 0.5}});
  CHECK(mixing_time_bound(iid).tau_mix == 1.0);
}

TEST_CASE("simulator: deterministic per seed and obeys the law of large numbers") {
  ObservationModel m = chain({"a", "b"}, {{0.9, 0.1}, {0.2, 0.8}});
  Simulator s1(m, 5), s2(m, 5);
  for (int i = 0; i < 1000; ++i) CHECK(s1.next_state() == s2.next_state());
  Simulator s(m, 17, StartMode::stationary);
  int a = 0;
  const int steps = 200000;
  for (int i = 0; i < steps; ++i) a += s.next_state() == 0;
  CHECK(std::abs(a / static_cast<double>(steps) - 2.0 / 3.0) < 0.01);
  ObservationModel cyc = chain({"a", "b"}, {{0.0, 1.0}, {1.0, 0.0}});
  Simulator c(cyc, 1);
  std::string out;
  for (int i = 0; i < 4; ++i) out += c.next();
  CHECK(out == "abab");
}

TEST_CASE("lending chain begins with a group symbol after init") {
  ObservationModel m = lending_mc();
  Simulator s(m, 3);
  CHECK(s.next() == "init");
  std::string g = s.next();
  CHECK((g == "g" || g == "ng"));
}

TEST_CASE("oracle: window probabilities and transition variables") {
  ObservationModel fair = chain({"a", "b"}, {{0.5, 0.5}, {0.5, 0.5}});
  CHECK(truth_value(fair, parse_expression("P[a a]")) == doctest::Approx(0.25).epsilon(1e-12));
  ObservationModel m = three_state();
  CHECK(truth_value(m, parse_expression("T[1->2]")) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(truth_value(m, parse_expression("T[1->2] * T[1->3]")) == doctest::Approx(0.15).epsilon(1e-12));
  // the window form and the matrix form of a conditional agree
  CHECK(truth_value(m, parse_expression("P[3 | 1]")) == doctest::Approx(0.5).epsilon(1e-12));
  ObservationModel two = chain({"a", "b"}, {{0.9, 0.1}, {0.2, 0.8}});
  CHECK(truth_value(two, parse_expression("P[a]")) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(truth_value(two, parse_expression("P[b]")) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(truth_value(two, parse_expression("P[a b]")) == doctest::Approx(1.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("oracle on the generated fairness models") {
  CHECK(truth_value(lending_mc(), lending_demographic_parity()) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(truth_value(lending_mc({0.5, 0.7, 0.7, 0.9, 0.8}), lending_demographic_parity()) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(truth_value(lending_mc(), lending_equal_opportunity()) == doctest::Approx(0.72 - 0.48).epsilon(1e-12));
  CHECK(truth_value(admission_mc(), admission_social_burden()) == doctest::Approx(1.0).epsilon(1e-12));
  ObservationModel pomc = lending_pomc();
  CHECK_FALSE(pomc.fully_observed());
  CHECK(truth_value(pomc, lending_pomc_demographic_parity()) == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(is_irreducible(pomc));
  CHECK(period(pomc) == 1);
}

TEST_CASE("oracle errors") {
  ObservationModel m = three_state();
  ObservationModel red = chain({"1", "2"}, {{1.0, 0.0}, {0.5, 0.5}});
  CHECK_THROWS_AS(truth_value(red, parse_expression("P[1]")), ModelError);
  ObservationModel pomc = lending_pomc();
  CHECK_THROWS(truth_value(pomc, parse_expression("P[Y | Q]")));
}

TEST_CASE("finitary semantics on a word") {
  std::vector<Symbol> w{"a", "b", "a", "a"};
  CHECK(finitary_value(parse_expression("P[a a]"), w) == doctest::Approx(1.0 / 3.0));
  CHECK(finitary_value(parse_expression("P[a]"), w) == doctest::Approx(0.75));
  CHECK(finitary_value(parse_expression("P[a] - P[b]"), w) == doctest::Approx(0.5));
  // T[a->b] = P[a b] / P[a]
  CHECK(finitary_value(parse_expression("T[a->b]"), w) == doctest::Approx((1.0 / 3.0) / 0.75));
  std::vector<Symbol> one{"a"};
  CHECK(std::isnan(finitary_value(parse_expression("P[a a]"), one)));
  std::vector<Symbol> ay{"A", "Y", "B", "N", "A", "Y"};
  CHECK(finitary_value(parse_expression("P[A Y]"), ay) == doctest::Approx(0.4));
}

TEST_CASE("model JSON round trip") {
  ObservationModel m = lending_pomc();
  ObservationModel back = model_from_json(model_to_json(m));
  CHECK(back.states == m.states);
  CHECK(back.labels == m.labels);
  CHECK((back.transition - m.transition).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS(model_from_json("{\"states\":[\"a\"],\"transitions\":[[0.5]]}"));
  CHECK_THROWS(model_from_json("not json"));
  ObservationModel plain = model_from_json(R"({"states":["x","y"],"transitions":[[0,1],[1,0]],"initial":[1,0]})");
  CHECK(plain.fully_observed());
  CHECK(plain.alphabet().symbols() == std::vector<Symbol>{"x", "y"});
}
