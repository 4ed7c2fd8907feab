#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "csma/conflict_graph.hpp"
#include "csma/distributed_mac.hpp"
#include "csma/rng.hpp"
#include "csma/verify.hpp"

using namespace csma;
using doctest::Approx;

namespace {

MacConfig bern() { return MacConfig{MacMechanism::kBernoulliHalf, 32, 1.0, 1.0}; }
MacConfig windowed(int w) { return MacConfig{MacMechanism::kWindowed, w, 1.0, 1.0}; }

double dist_prob(const DecisionDistribution& d, const Schedule& s) {
  for (const auto& [sched, p] : d)
    if (sched == s) return p;
  return 0.0;
}

}  // namespace

TEST_CASE("coin-flip decisions on a conflicting pair") {
  ConflictGraph k2(2, {{0, 1}});
  auto d = enumerate_decision_distribution(k2, bern());
  // send patterns: both -> mutual silence, one -> that link, none -> empty
  CHECK_EQ(dist_prob(d, Schedule(2)), Approx(0.5));
  CHECK_EQ(dist_prob(d, Schedule::from_indices(2, {0})), Approx(0.25));
  CHECK_EQ(dist_prob(d, Schedule::from_indices(2, {1})), Approx(0.25));

  double total = 0.0;
  for (const auto& [s, p] : d) total += p;
  CHECK_EQ(total, Approx(1.0));

  // empirical frequencies agree within 4 sigma
  const int n = 100000;
  std::map<std::uint64_t, int> counts;
  SeededRng rng(42);
  for (int t = 0; t < n; ++t) {
    Schedule s = decision_bernoulli(k2, rng);
    CHECK(k2.is_independent(s));
    counts[s.low_word()]++;
  }
  for (const auto& [sched, p] : d) {
    double freq = double(counts[sched.low_word()]) / n;
    double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(freq - p) <= 4 * sigma);
  }
}

TEST_CASE("coin-flip decisions carry every independent set") {
  SeededRng rng(7);
  ConflictGraph g = random_graph(5, 0.5, rng);
  auto d = enumerate_decision_distribution(g, bern());
  auto sets = g.enumerate_independent_sets();
  // sender-only inclusion: each independent set shows up with probability
  // at least 2^-N
  for (const auto& s : sets) CHECK(dist_prob(d, s) >= std::pow(0.5, 5) - 1e-12);
  // support in canonical order
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i - 1].first < d[i].first);
}

TEST_CASE("backoff resolution by hand") {
  ConflictGraph k2(2, {{0, 1}});
  // earlier backoff wins
  CHECK(windowed_resolution(k2, 8, {3, 7}) == Schedule::from_indices(2, {0}));
  CHECK(windowed_resolution(k2, 8, {7, 3}) == Schedule::from_indices(2, {1}));
  // tie is a collision: nobody enters
  CHECK(windowed_resolution(k2, 8, {5, 5}) == Schedule(2));

  ConflictGraph p3(3, {{0, 1}, {1, 2}});
  // ends tie but do not conflict; middle hears both and withdraws
  CHECK(windowed_resolution(p3, 8, {2, 5, 2}) == Schedule::from_indices(3, {0, 2}));
  // middle wins alone
  CHECK(windowed_resolution(p3, 8, {4, 1, 6}) == Schedule::from_indices(3, {1}));
  // colliding pair still silences the later third link
  CHECK(windowed_resolution(p3, 8, {2, 2, 4}) == Schedule(3));
  // everyone collides
  CHECK(windowed_resolution(p3, 8, {1, 1, 1}) == Schedule(3));

  CHECK_THROWS_AS(windowed_resolution(k2, 8, {0}), std::invalid_argument);
  CHECK_THROWS_AS(windowed_resolution(k2, 8, {0, 8}), std::invalid_argument);
  CHECK_THROWS_AS(windowed_resolution(k2, 0, {0, 0}), std::invalid_argument);
}

TEST_CASE("a lone link always wins its slot") {
  ConflictGraph one(1, {});
  SeededRng rng(9);
  for (int t = 0; t < 200; ++t) {
    Schedule s = decision_windowed(one, 4, rng);
    CHECK(s.test(0));
  }
  auto d = enumerate_decision_distribution(one, windowed(4));
  REQUIRE_EQ(d.size(), 1);
  CHECK_EQ(dist_prob(d, Schedule::from_indices(1, {0})), Approx(1.0));
}

TEST_CASE("window of one collides every neighborhood") {
  // all backoffs are 0: isolated links win, any conflicting link collides
  ConflictGraph star = star_graph(3);
  auto d = enumerate_decision_distribution(star, windowed(1));
  REQUIRE_EQ(d.size(), 1);
  CHECK_EQ(dist_prob(d, Schedule(4)), Approx(1.0));

  ConflictGraph mixed(3, {{0, 1}});  // link 2 isolated
  auto d2 = enumerate_decision_distribution(mixed, windowed(1));
  REQUIRE_EQ(d2.size(), 1);
  CHECK(d2[0].first == Schedule::from_indices(3, {2}));
}

TEST_CASE("windowed distribution on a pair, window 4") {
  ConflictGraph k2(2, {{0, 1}});
  auto d = enumerate_decision_distribution(k2, windowed(4));
  // P(T0 < T1) = 6/16, symmetric; ties 4/16
  CHECK_EQ(dist_prob(d, Schedule::from_indices(2, {0})), Approx(6.0 / 16.0));
  CHECK_EQ(dist_prob(d, Schedule::from_indices(2, {1})), Approx(6.0 / 16.0));
  CHECK_EQ(dist_prob(d, Schedule(2)), Approx(4.0 / 16.0));
}

TEST_CASE("windowed enumeration matches a direct sweep of backoff vectors") {
  SeededRng rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    int n = 2 + trial % 3;
    int window = 2 + trial % 3;
    ConflictGraph g = random_graph(n, 0.6, rng);
    auto d = enumerate_decision_distribution(g, windowed(window));

    std::map<std::uint64_t, double> direct;
    std::vector<int> backoff(n, 0);
    long combos = 1;
    for (int l = 0; l < n; ++l) combos *= window;
    for (long code = 0; code < combos; ++code) {
      long c = code;
      for (int l = 0; l < n; ++l) {
        backoff[l] = int(c % window);
        c /= window;
      }
      direct[windowed_resolution(g, window, backoff).low_word()] += 1.0 / double(combos);
    }
    double worst = 0.0;
    for (const auto& [sched, p] : d)
      worst = std::max(worst, std::abs(p - direct[sched.low_word()]));
    CHECK(worst <= 1e-12);
    std::size_t support = 0;
    for (const auto& [mask, p] : direct)
      if (p > 0) ++support;
    CHECK_EQ(support, d.size());
  }
}

TEST_CASE("windowed sampling matches the enumerated law") {
  ConflictGraph p4(4, {{0, 1}, {1, 2}, {2, 3}});
  auto d = enumerate_decision_distribution(p4, windowed(32));
  const int n = 100000;
  std::map<std::uint64_t, int> counts;
  SeededRng rng(123);
  for (int t = 0; t < n; ++t) {
    Schedule s = decision_windowed(p4, 32, rng);
    CHECK(p4.is_independent(s));
    counts[s.low_word()]++;
  }
  double tv = 0.0;
  for (const auto& [sched, p] : d) tv += std::abs(double(counts[sched.low_word()]) / n - p);
  CHECK(tv / 2.0 <= 0.01);
}

TEST_CASE("slot capacity split") {
  CHECK_EQ(capacity_fraction(1.0, 1.0), Approx(0.5));
  CHECK_EQ(capacity_fraction(9.0, 1.0), Approx(0.9));
  CHECK_THROWS_AS(capacity_fraction(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(capacity_fraction(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("enumeration guards") {
  ConflictGraph big(13, {});
  CHECK_THROWS_AS(enumerate_decision_distribution(big, bern()), std::invalid_argument);
  ConflictGraph wide(4, {});
  MacConfig huge = windowed(100000);
  CHECK_THROWS_AS(enumerate_decision_distribution(wide, huge), std::invalid_argument);
}
