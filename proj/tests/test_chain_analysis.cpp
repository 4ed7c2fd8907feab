#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "csma/chain_analysis.hpp"
#include "csma/conflict_graph.hpp"
#include "csma/glauber.hpp"
#include "csma/rng.hpp"
#include "csma/verify.hpp"

using namespace csma;
using doctest::Approx;

TEST_CASE("worst-case mixing bounds") {
  MixingBound s = mixing_bound_single(1, 0.0);
  CHECK_EQ(s.value, Approx(16.0));
  CHECK_EQ(s.log_value, Approx(std::log(16.0)));

  MixingBound m = mixing_bound_multi(1, 0.0);
  CHECK_EQ(m.value, Approx(32.0));

  MixingBound s2 = mixing_bound_single(2, 2.0);
  CHECK_EQ(s2.log_value, Approx(std::log(256.0) + 16.0));
  CHECK_EQ(s2.value, Approx(256.0 * std::exp(16.0)));

  // the parallel-chain bound dominates the single-site one
  for (int n = 1; n <= 8; ++n)
    for (double w : {0.0, 1.0, 2.0})
      CHECK(mixing_bound_multi(n, w).log_value >= mixing_bound_single(n, w).log_value);

  // representable threshold: log over ~700 flips value to +inf
  MixingBound big = mixing_bound_single(24, 8.0);
  CHECK(std::isinf(big.value));
  CHECK(std::isfinite(big.log_value));

  CHECK_THROWS_AS(mixing_bound_single(0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mixing_bound_single(2, -0.1), std::invalid_argument);
}

TEST_CASE("spectrum of the uniform pair chain") {
  ConflictGraph k2(2, {{0, 1}});
  ChainModel model = transition_matrix_single(k2, {0.0, 0.0});
  SpectralReport rep = slem(model);
  REQUIRE_EQ(rep.eigenvalues.size(), 3);
  CHECK_EQ(rep.eigenvalues[0], Approx(1.0));
  CHECK_EQ(rep.eigenvalues[1], Approx(0.75));
  CHECK_EQ(rep.eigenvalues[2], Approx(0.25));
  CHECK_EQ(rep.lambda2, Approx(0.75));
  CHECK_EQ(rep.lambda_min, Approx(0.25));
  CHECK_EQ(rep.slem, Approx(0.75));
  CHECK_EQ(rep.spectral_gap, Approx(0.25));
  CHECK_EQ(rep.mixing_time, Approx(4.0));
  CHECK(rep.bound_holds);
  CHECK(rep.detailed_balance_residual <= 1e-12);
}

TEST_CASE("slem rejects irreversible kernels") {
  ConflictGraph k2(2, {{0, 1}});
  ChainModel model = transition_matrix_single(k2, {0.0, 0.0});
  model.kernel(0, 1) += 0.1;  // rows still sum to 1
  model.kernel(0, 0) -= 0.1;
  CHECK_THROWS_AS(slem(model), std::runtime_error);
}

TEST_CASE("bottleneck of tiny chains by hand") {
  // lone link: B = one of the two states, flow 1/2 * 1/2, mass 1/2
  ConflictGraph one(1, {});
  ChainModel m1 = transition_matrix_single(one, {0.0});
  ConductanceResult c1 = conductance(m1);
  CHECK_EQ(c1.phi, Approx(0.5));
  CHECK_EQ(c1.min_cut_states.size(), 1);

  // uniform pair: cut a singleton active state, flow (1/3)(1/4)
  ConflictGraph k2(2, {{0, 1}});
  ChainModel m2 = transition_matrix_single(k2, {0.0, 0.0});
  ConductanceResult c2 = conductance(m2);
  CHECK_EQ(c2.phi, Approx(0.25));

  SpectralReport rep = slem(m2);
  CHECK(1.0 - 2.0 * c2.phi <= rep.lambda2 + 1e-12);
  CHECK(rep.lambda2 <= 1.0 - c2.phi * c2.phi / 2.0 + 1e-12);
}

TEST_CASE("conductance guards") {
  ConflictGraph p5(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  ChainModel m = transition_matrix_single(p5, std::vector<double>(5, 0.5));
  CHECK_NOTHROW(conductance(m));
  CHECK_THROWS_AS(conductance(m, 5), std::invalid_argument);   // 13 states > 5
  CHECK_THROWS_AS(conductance(m, 31), std::invalid_argument);  // cap above hard limit
}

TEST_CASE("eigenvalue floor from diagonal mass") {
  ConflictGraph k2(2, {{0, 1}});
  ChainModel m = transition_matrix_single(k2, {0.0, 0.0});
  // diagonals: 1/2 at the empty state, 3/4 at the actives
  CHECK_EQ(gershgorin_floor(m), Approx(0.0));
  SpectralReport rep = slem(m);
  CHECK(rep.lambda_min >= gershgorin_floor(m) - 1e-12);

  ChainModel hot = transition_matrix_single(k2, {3.0, 3.0});
  CHECK(gershgorin_floor(hot) > -1.0);
  CHECK(slem(hot).lambda_min >= gershgorin_floor(hot) - 1e-12);
}

TEST_CASE("distribution distances") {
  Eigen::VectorXd p(2), q(2);
  p << 1.0, 0.0;
  q << 0.75, 0.25;
  CHECK_EQ(tv_distance(p, q), Approx(0.25));
  CHECK_EQ(tv_distance(p, p), Approx(0.0));
  CHECK_EQ(tv_distance(q, p), tv_distance(p, q));

  Eigen::VectorXd bad(2);
  bad << 0.9, 0.2;
  CHECK_THROWS_AS(tv_distance(p, bad), std::invalid_argument);
  Eigen::VectorXd shorter(1);
  shorter << 1.0;
  CHECK_THROWS_AS(tv_distance(p, shorter), std::invalid_argument);

  // weighted norm dominates twice the tv distance
  SeededRng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + rng.uniform_int(6);
    Eigen::VectorXd a(n), b(n), pi(n);
    double sa = 0, sb = 0, sp = 0;
    for (int i = 0; i < n; ++i) {
      a[i] = rng.uniform01() + 1e-3;
      b[i] = rng.uniform01() + 1e-3;
      pi[i] = rng.uniform01() + 1e-3;
      sa += a[i];
      sb += b[i];
      sp += pi[i];
    }
    a /= sa;
    b /= sb;
    pi /= sp;
    CHECK(pi_norm_inv(a - b, pi) >= 2.0 * tv_distance(a, b) - 1e-12);
  }
}

TEST_CASE("drift coefficient shrinks as the ceiling rises") {
  WeightConfig c{WeightFunctionSpec::log_over_loglog(), 0.5, 1, true};
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t q : {100LL, 1000LL, 100000LL, 10000000LL}) {
    double a = alpha_t(c, q);
    CHECK(a > 0);
    CHECK(a < prev);
    prev = a;
  }
  // floor too low for the shift at small ceilings
  CHECK_THROWS_AS(alpha_t(c, 10), std::domain_error);
}

TEST_CASE("slow-ramp condition report") {
  WeightConfig lol{WeightFunctionSpec::log_over_loglog(), 0.5, 1, true};
  AdiabaticReport r = adiabatic_condition(lol, 1000000, 0.2, ChainKind::kSingleSite);
  CHECK_EQ(r.delta, Approx(0.2));
  CHECK_FALSE(r.shift_clamped);
  CHECK_EQ(r.log_condition_lhs, Approx(r.log_alpha + r.log_mixing_bound));
  CHECK_EQ(r.satisfied, r.log_condition_lhs <= std::log(0.2 / 16.0));
  CHECK_EQ(r.alpha, Approx(alpha_t(lol, 1000000)));

  // small ceiling clamps the -1 shift instead of throwing
  WeightConfig narrow{WeightFunctionSpec::log_over_loglog(), 0.2, 2, true};
  AdiabaticReport clamped = adiabatic_condition(narrow, 1000, 0.2, ChainKind::kSingleSite);
  CHECK(clamped.shift_clamped);

  // a linear weight blows the bound up far faster than the log family
  WeightConfig lin{WeightFunctionSpec::linear(), 0.5, 1, true};
  AdiabaticReport rl = adiabatic_condition(lin, 1000000, 0.2, ChainKind::kSingleSite);
  CHECK(rl.log_condition_lhs > r.log_condition_lhs + 1e6);
  CHECK_FALSE(rl.satisfied);

  // parallel kind uses the larger bound
  AdiabaticReport rm = adiabatic_condition(lol, 1000000, 0.2, ChainKind::kMultiSite);
  CHECK(rm.log_mixing_bound > r.log_mixing_bound);
}

TEST_CASE("switch-over thresholds") {
  auto lp = WeightFunctionSpec::log_power(0.5);
  auto lol = WeightFunctionSpec::log_over_loglog();

  // closed form, N = 24: the a2 branch dominates and squares to ~2.6e23
  double lq24 = q_threshold(24, 0.2, 0.1, lp);
  CHECK(lq24 > 2.55e23);
  CHECK(lq24 < 2.65e23);

  // grows with the link count
  double prev = 0.0;
  for (int n : {2, 4, 8, 16}) {
    double v = q_threshold(n, 0.2, 0.1, lp);
    CHECK(std::isfinite(v));
    CHECK(v > prev);
    prev = v;
  }

  // the general form overflows early but stays finite at desk scale
  double lq_lol = q_threshold(2, 0.5, 0.1, lol);
  CHECK(lq_lol > 3.0e56);
  CHECK(lq_lol < 3.3e56);
  CHECK(std::isinf(q_threshold(4, 0.2, 0.1, lol)));

  // downstream thresholds inherit the magnitude
  double lt = t_star(24, 0.2, 0.1, 0.5, lq24);
  CHECK(std::isfinite(lt));
  CHECK(lt > 0.2 / 48.0 * lq24);
  double lb = b_threshold(24, 0.2, 0.1, lp, lq24, lt);
  CHECK(lb >= lq24);
  CHECK(lb >= lt);
  CHECK(std::isinf(t_star(4, 0.2, 0.1, 0.0, std::numeric_limits<double>::infinity())));

  CHECK_THROWS_AS(q_threshold(24, 0.2, 0.1, WeightFunctionSpec::linear()), std::invalid_argument);
  CHECK_THROWS_AS(q_threshold(0, 0.2, 0.1, lp), std::invalid_argument);
  CHECK_THROWS_AS(q_threshold(24, 0.0, 0.1, lp), std::invalid_argument);
  CHECK_THROWS_AS(q_threshold(24, 0.2, 1.0, lp), std::invalid_argument);
}

TEST_CASE("exact propagation through constant kernels") {
  ConflictGraph k2(2, {{0, 1}});
  std::vector<std::vector<double>> trace(30, std::vector<double>{1.0, 1.0});
  Eigen::VectorXd mu0(3);
  mu0 << 1.0, 0.0, 0.0;
  auto steps = propagate_distribution(k2, trace, mu0);
  REQUIRE_EQ(steps.size(), 30);

  auto pi = stationary_distribution(k2, {1.0, 1.0});
  ChainModel m = transition_matrix_single(k2, {1.0, 1.0});
  double sigma = slem(m).slem;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    CHECK_EQ(steps[k].mu.sum(), Approx(1.0));
    CHECK_EQ(tv_distance(steps[k].pi, pi), Approx(0.0));
    CHECK_EQ(steps[k].sigma, Approx(sigma));
    CHECK_EQ(steps[k].mixing_time, Approx(1.0 / (1.0 - sigma)));
    CHECK(steps[k].norm_dist >= 2.0 * steps[k].tv - 1e-12);
    if (k > 0) CHECK(steps[k].tv <= steps[k - 1].tv + 1e-12);
    if (k + 1 < steps.size())
      CHECK(std::isfinite(steps[k].a_next));
    else
      CHECK(std::isnan(steps[k].a_next));
  }
  // geometric contraction toward the fixed law
  CHECK(steps.back().tv <= std::pow(sigma, 25));

  // a ramp moves the instantaneous law every step
  std::vector<std::vector<double>> ramp;
  for (int k = 0; k < 10; ++k) ramp.push_back({0.05 * k, 0.05 * k});
  auto rsteps = propagate_distribution(k2, ramp, pi);
  for (std::size_t k = 1; k < rsteps.size(); ++k)
    CHECK(tv_distance(rsteps[k].pi, rsteps[k - 1].pi) > 0.0);

  CHECK_THROWS_AS(propagate_distribution(k2, {}, mu0), std::invalid_argument);
  Eigen::VectorXd bad(3);
  bad << 0.5, 0.2, 0.2;
  CHECK_THROWS_AS(propagate_distribution(k2, trace, bad), std::invalid_argument);
}

TEST_CASE("warm-up slot accumulates inverse squared mixing times") {
  // constant T = 2, one free link at weight 0: target log(4/delta) + (0+log2)/2
  std::vector<double> times(40, 2.0);
  auto slot = adiabatic_warmup_slot(times, 0.2, 1, 0.0);
  REQUIRE(slot.has_value());
  // (t+1)/4 >= log(20) + log(2)/2 = 3.342 -> t = 13
  CHECK_EQ(*slot, 13);

  // trace too short to accumulate enough
  std::vector<double> brief(5, 2.0);
  CHECK_FALSE(adiabatic_warmup_slot(brief, 0.2, 1, 0.0).has_value());

  // faster chains warm up sooner
  std::vector<double> fast(40, 1.5);
  auto quick = adiabatic_warmup_slot(fast, 0.2, 1, 0.0);
  REQUIRE(quick.has_value());
  CHECK(*quick < *slot);

  CHECK_THROWS_AS(adiabatic_warmup_slot(times, 0.0, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(adiabatic_warmup_slot(std::vector<double>{0.5}, 0.2, 1, 0.0),
                  std::invalid_argument);
}
