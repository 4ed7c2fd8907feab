#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "csma/weights.hpp"

using namespace csma;
using doctest::Approx;

namespace {

std::vector<WeightFunctionSpec> all_kinds() {
  return {WeightFunctionSpec::log_over_loglog(), WeightFunctionSpec::log_power(0.3),
          WeightFunctionSpec::log_power(0.5),    WeightFunctionSpec::log_power(0.7),
          WeightFunctionSpec::loglog(),          WeightFunctionSpec::linear(),
          WeightFunctionSpec::sqrt()};
}

}  // namespace

TEST_CASE("value anchors") {
  auto lol = WeightFunctionSpec::log_over_loglog();
  CHECK_EQ(f_value(lol, 0.0), Approx(0.0));
  // f(q) = log(1+q)/log(e+log(1+q))
  double q = 100.0;
  CHECK_EQ(f_value(lol, q), Approx(std::log1p(q) / std::log(std::exp(1.0) + std::log1p(q))));

  CHECK_EQ(f_value(WeightFunctionSpec::loglog(), 0.0), Approx(0.0));
  CHECK_EQ(f_value(WeightFunctionSpec::loglog(), 10.0),
           Approx(std::log(std::log(std::exp(1.0) + 10.0))));

  CHECK_EQ(f_value(WeightFunctionSpec::linear(), 7.5), Approx(7.5));
  CHECK_EQ(f_value(WeightFunctionSpec::sqrt(), 4.0), Approx(2.0));

  auto lp = WeightFunctionSpec::log_power(0.5);
  CHECK_EQ(f_value(lp, std::exp(1.0) - 1.0), Approx(1.0));
  CHECK_EQ(f_value(lp, 0.0), Approx(0.0));
}

TEST_CASE("spec construction validates theta") {
  CHECK_THROWS_AS(WeightFunctionSpec::log_power(0.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightFunctionSpec::log_power(1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightFunctionSpec::log_power(-0.1), std::invalid_argument);
  CHECK_NOTHROW(WeightFunctionSpec::log_power(0.01));
}

TEST_CASE("kind names") {
  CHECK_EQ(weight_kind_name(WeightFunctionSpec::log_over_loglog()), "log_over_loglog");
  CHECK_EQ(weight_kind_name(WeightFunctionSpec::log_power(0.5)), "log_power_0.5");
  CHECK_EQ(weight_kind_name(WeightFunctionSpec::loglog()), "loglog");
  CHECK_EQ(weight_kind_name(WeightFunctionSpec::linear()), "linear");
  CHECK_EQ(weight_kind_name(WeightFunctionSpec::sqrt()), "sqrt");
}

TEST_CASE("strictly increasing, concave family concave") {
  for (const auto& spec : all_kinds()) {
    double prev = f_value(spec, 0.0);
    for (double q = 0.5; q < 1e8; q *= 3.7) {
      double cur = f_value(spec, q);
      CHECK(cur > prev);
      prev = cur;
    }
  }
  for (const auto& spec : {WeightFunctionSpec::log_over_loglog(), WeightFunctionSpec::log_power(0.4)}) {
    for (double a = 1.0; a < 1e7; a *= 4.1) {
      double b = 2.5 * a + 3.0;
      double mid = f_value(spec, (a + b) / 2.0);
      CHECK(mid >= (f_value(spec, a) + f_value(spec, b)) / 2.0 - 1e-12);
    }
  }
}

TEST_CASE("derivative matches central differences") {
  for (const auto& spec : all_kinds()) {
    for (double q = 1.0; q < 1e6; q *= 2.9) {
      double h = q * 1e-6;
      double num = (f_value(spec, q + h) - f_value(spec, q - h)) / (2 * h);
      double ana = f_prime(spec, q);
      CHECK_EQ(ana, Approx(num).epsilon(1e-6));
    }
  }
  CHECK(std::isinf(f_prime(WeightFunctionSpec::sqrt(), 0.0)));
  CHECK(std::isinf(f_prime(WeightFunctionSpec::log_power(0.5), 0.0)));
  CHECK_EQ(f_prime(WeightFunctionSpec::linear(), 0.0), Approx(1.0));
}

TEST_CASE("inverse round trips") {
  for (const auto& spec : all_kinds()) {
    for (double q = 0.25; q < 1e6; q *= 3.3) {
      double w = f_value(spec, q);
      CHECK_EQ(f_inverse(spec, w), Approx(q).epsilon(1e-9));
      CHECK_EQ(f_value(spec, f_inverse(spec, w)), Approx(w).epsilon(1e-9));
    }
    CHECK_EQ(f_inverse(spec, 0.0), Approx(0.0));
  }
  CHECK_THROWS_AS(f_inverse(WeightFunctionSpec::linear(), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(f_value(WeightFunctionSpec::linear(), -1.0), std::invalid_argument);
}

TEST_CASE("log-space companions agree with the direct forms") {
  for (const auto& spec : all_kinds()) {
    for (double q = 0.5; q < 1e8; q *= 5.1) {
      double L = std::log1p(q);
      CHECK_EQ(f_at_log1p(spec, L), Approx(f_value(spec, q)).epsilon(1e-12));
      if (f_prime(spec, q) > 0)
        CHECK_EQ(log_f_prime_at_log1p(spec, L), Approx(std::log(f_prime(spec, q))).epsilon(1e-9));
    }
  }
  // inverses survive magnitudes where f_inverse itself overflows
  auto lol = WeightFunctionSpec::log_over_loglog();
  for (double w : {0.5, 2.0, 20.0, 400.0, 5000.0}) {
    double L = log1p_f_inverse(lol, w);
    CHECK_EQ(f_at_log1p(lol, L), Approx(w).epsilon(1e-9));
  }
  auto lp = WeightFunctionSpec::log_power(0.5);
  for (double w : {0.5, 2.0, 20.0, 400.0}) {
    double L = log1p_f_inverse(lp, w);
    CHECK_EQ(f_at_log1p(lp, L), Approx(w).epsilon(1e-9));
  }
}

TEST_CASE("g denominator and its inverse") {
  auto lol = WeightFunctionSpec::log_over_loglog();
  CHECK_EQ(g_value(lol, 0.0), Approx(1.0));
  for (double q = 1.0; q < 1e7; q *= 9.0) {
    CHECK_EQ(f_value(lol, q) * g_value(lol, q), Approx(std::log1p(q)).epsilon(1e-12));
    CHECK_EQ(g_inverse(lol, g_value(lol, q)), Approx(q).epsilon(1e-8));
    CHECK_EQ(log1p_g_inverse(lol, g_value(lol, q)), Approx(std::log1p(q)).epsilon(1e-9));
  }
  auto lp = WeightFunctionSpec::log_power(0.5);
  CHECK_EQ(g_inverse(lp, g_value(lp, 50.0)), Approx(50.0).epsilon(1e-8));

  CHECK_THROWS_AS(g_value(WeightFunctionSpec::linear(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(g_inverse(WeightFunctionSpec::sqrt(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(g_inverse(lol, 0.5), std::invalid_argument);  // below g(0)
}

TEST_CASE("floor value and monotonicity") {
  WeightConfig c{WeightFunctionSpec::log_over_loglog(), 0.2, 24, true};
  CHECK_EQ(w_min(c, 0), Approx(0.0));
  CHECK_EQ(w_min(c, 1000), Approx(0.2 / 48.0 * f_value(c.spec, 1000.0)));
  double prev = -1.0;
  for (std::int64_t q : {0LL, 1LL, 10LL, 1000LL, 1000000LL}) {
    double v = w_min(c, q);
    CHECK(v >= prev);
    prev = v;
  }
  // more links -> lower floor
  WeightConfig tight{c.spec, 0.2, 4, true};
  CHECK(w_min(tight, 1000) > w_min(c, 1000));
  CHECK_THROWS_AS(w_min(c, -1), std::invalid_argument);
}

TEST_CASE("effective weights apply the floor only when asked") {
  WeightConfig on{WeightFunctionSpec::log_over_loglog(), 0.2, 2, true};
  WeightConfig off{WeightFunctionSpec::log_over_loglog(), 0.2, 2, false};
  std::int64_t qmax = 100000;
  double floor = w_min(on, qmax);
  CHECK(floor > 0);
  CHECK_EQ(effective_weight(on, 0, qmax), Approx(floor));
  CHECK_EQ(effective_weight(off, 0, qmax), Approx(0.0));
  CHECK_EQ(effective_weight(on, qmax, qmax), Approx(f_value(on.spec, double(qmax))));

  CHECK_THROWS_AS(effective_weight(on, -1, qmax), std::invalid_argument);
  CHECK_THROWS_AS(effective_weight(on, qmax + 1, qmax), std::invalid_argument);

  std::vector<std::int64_t> queues{0, 50, 100000};
  WeightConfig on3{on.spec, on.epsilon, 3, true};
  auto w = effective_weights(on3, queues);
  REQUIRE_EQ(w.size(), 3);
  double fl3 = w_min(on3, 100000);
  CHECK_EQ(w[0], Approx(fl3));
  CHECK_EQ(w[1], Approx(std::max(f_value(on3.spec, 50.0), fl3)));
  CHECK_EQ(w[2], Approx(f_value(on3.spec, 100000.0)));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(w_min(WeightConfig{WeightFunctionSpec::log_over_loglog(), 0.0, 2, true}, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(w_min(WeightConfig{WeightFunctionSpec::log_over_loglog(), 1.0, 2, true}, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(w_min(WeightConfig{WeightFunctionSpec::log_over_loglog(), 0.2, 0, true}, 10),
                  std::invalid_argument);
}
