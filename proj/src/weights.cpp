#include "csma/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace csma {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_q(double q) {
  if (!(q >= 0)) throw std::invalid_argument("weight function: q must be >= 0");
}

void check_w(double w) {
  if (!(w >= 0)) throw std::invalid_argument("weight inverse: w must be >= 0");
}

void check_config(const WeightConfig& c) {
  if (!(c.epsilon > 0 && c.epsilon < 1))
    throw std::invalid_argument("WeightConfig: epsilon must lie in (0,1)");
  if (c.num_links < 1) throw std::invalid_argument("WeightConfig: num_links must be >= 1");
}

// solve L / log(e + L) = w for L >= 0 (monotone increasing lhs)
double solve_log_over_loglog(double w) {
  if (w <= 0) return 0.0;
  auto h = [](double L) { return L / std::log(kE + L); };
  double lo = 0.0;
  double hi = std::max(1.0, w);
  while (h(hi) < w) {
    lo = hi;
    hi *= 2;
    if (hi > 1e306) return kInf;
  }
  double L = std::min(hi, std::max(lo, w * std::log(kE + w)));
  for (int iter = 0; iter < 200; ++iter) {
    const double G = std::log(kE + L);
    const double val = L / G - w;
    if (val > 0)
      hi = L;
    else
      lo = L;
    const double deriv = (G - L / (kE + L)) / (G * G);
    double next = L - val / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - L) <= 1e-15 * std::max(1.0, std::abs(next))) return next;
    L = next;
  }
  return L;
}

}  // namespace

WeightFunctionSpec WeightFunctionSpec::log_power(double theta) {
  if (!(theta > 0 && theta < 1))
    throw std::invalid_argument("log_power: theta must lie in (0,1)");
  return {WeightKind::kLogPower, theta};
}

std::string weight_kind_name(const WeightFunctionSpec& spec) {
  switch (spec.kind) {
    case WeightKind::kLogOverLogLog:
      return "log_over_loglog";
    case WeightKind::kLogPower: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "log_power_%g", spec.theta);
      return buf;
    }
    case WeightKind::kLogLog:
      return "loglog";
    case WeightKind::kLinear:
      return "linear";
    case WeightKind::kSqrt:
      return "sqrt";
  }
  throw std::logic_error("weight_kind_name: unknown kind");
}

double f_value(const WeightFunctionSpec& spec, double q) {
  check_q(q);
  switch (spec.kind) {
    case WeightKind::kLogOverLogLog: {
      const double L = std::log1p(q);
      return L / std::log(kE + L);
    }
    case WeightKind::kLogPower:
      return std::pow(std::log1p(q), 1.0 - spec.theta);
    case WeightKind::kLogLog:
      return std::log(std::log(kE + q));
    case WeightKind::kLinear:
      return q;
    case WeightKind::kSqrt:
      return std::sqrt(q);
  }
  throw std::logic_error("f_value: unknown kind");
}

double f_prime(const WeightFunctionSpec& spec, double q) {
  check_q(q);
  switch (spec.kind) {
    case WeightKind::kLogOverLogLog: {
      const double L = std::log1p(q);
      const double G = std::log(kE + L);
      return (G - L / (kE + L)) / (G * G) / (1.0 + q);
    }
    case WeightKind::kLogPower: {
      const double L = std::log1p(q);
      return (1.0 - spec.theta) * std::pow(L, -spec.theta) / (1.0 + q);
    }
    case WeightKind::kLogLog:
      return 1.0 / ((kE + q) * std::log(kE + q));
    case WeightKind::kLinear:
      return 1.0;
    case WeightKind::kSqrt:
      return q == 0 ? kInf : 0.5 / std::sqrt(q);
  }
  throw std::logic_error("f_prime: unknown kind");
}

double f_inverse(const WeightFunctionSpec& spec, double w) {
  check_w(w);
  switch (spec.kind) {
    case WeightKind::kLogOverLogLog:
      return std::expm1(solve_log_over_loglog(w));
    case WeightKind::kLogPower:
      return std::expm1(std::pow(w, 1.0 / (1.0 - spec.theta)));
    case WeightKind::kLogLog:
      return std::exp(std::exp(w)) - kE;
    case WeightKind::kLinear:
      return w;
    case WeightKind::kSqrt:
      return w * w;
  }
  throw std::logic_error("f_inverse: unknown kind");
}

double f_at_log1p(const WeightFunctionSpec& spec, double L) {
  if (!(L >= 0)) throw std::invalid_argument("f_at_log1p: L must be >= 0");
  switch (spec.kind) {
    case WeightKind::kLogOverLogLog:
      return L / std::log(kE + L);
    case WeightKind::kLogPower:
      return std::pow(L, 1.0 - spec.theta);
    case WeightKind::kLogLog: {
      // log(e + q) = L + log1p((e-1)e^{-L})
      const double A = L < 40 ? std::log(kE + std::expm1(L)) : L + std::log1p((kE - 1) * std::exp(-L));
      return std::log(A);
    }
    case WeightKind::kLinear:
      return std::expm1(L);
    case WeightKind::kSqrt:
      return std::sqrt(std::expm1(L));
  }
  throw std::logic_error("f_at_log1p: unknown kind");
}

double log1p_f_inverse(const WeightFunctionSpec& spec, double w) {
  check_w(w);
  switch (spec.kind) {
    case WeightKind::kLogOverLogLog:
      return solve_log_over_loglog(w);
    case WeightKind::kLogPower:
      return std::pow(w, 1.0 / (1.0 - spec.theta));
    case WeightKind::kLogLog: {
      const double t = std::exp(w);
      if (t > 40) return t + std::log1p(-(kE - 1) * std::exp(-t));
      return std::log1p(std::exp(t) - kE);
    }
    case WeightKind::kLinear:
      return std::log1p(w);
    case WeightKind::kSqrt:
      return std::log1p(w * w);
  }
  throw std::logic_error("log1p_f_inverse: unknown kind");
}

double log_f_prime_at_log1p(const WeightFunctionSpec& spec, double L) {
  if (!(L >= 0)) throw std::invalid_argument("log_f_prime_at_log1p: L must be >= 0");
  switch (spec.kind) {
    case WeightKind::kLogOverLogLog: {
      const double G = std::log(kE + L);
      return -L + std::log(G - L / (kE + L)) - 2.0 * std::log(G);
    }
    case WeightKind::kLogPower:
      return std::log(1.0 - spec.theta) - spec.theta * std::log(L) - L;
    case WeightKind::kLogLog: {
      const double A = L < 40 ? std::log(kE + std::expm1(L)) : L + std::log1p((kE - 1) * std::exp(-L));
      return -A - std::log(A);
    }
    case WeightKind::kLinear:
      return 0.0;
    case WeightKind::kSqrt: {
      if (L == 0) return kInf;  // f'(0) = +inf
      // log(q) = L + log1p(-e^{-L})
      const double logq = L + std::log1p(-std::exp(-L));
      return -std::log(2.0) - 0.5 * logq;
    }
  }
  throw std::logic_error("log_f_prime_at_log1p: unknown kind");
}

double g_value(const WeightFunctionSpec& spec, double q) {
  check_q(q);
  switch (spec.kind) {
    case WeightKind::kLogOverLogLog:
      return std::log(kE + std::log1p(q));
    case WeightKind::kLogPower:
      return std::pow(std::log1p(q), spec.theta);
    default:
      throw std::invalid_argument("g_value: defined for the concave family only");
  }
}

double g_inverse(const WeightFunctionSpec& spec, double z) {
  return std::expm1(log1p_g_inverse(spec, z));
}

double log1p_g_inverse(const WeightFunctionSpec& spec, double z) {
  if (!(z >= 0)) throw std::invalid_argument("g_inverse: z must be >= 0");
  switch (spec.kind) {
    case WeightKind::kLogOverLogLog: {
      if (z < 1.0) throw std::invalid_argument("g_inverse: below g(0) = 1");
      return std::exp(z) - kE;
    }
    case WeightKind::kLogPower:
      return std::pow(z, 1.0 / spec.theta);
    default:
      throw std::invalid_argument("g_inverse: defined for the concave family only");
  }
}

double w_min(const WeightConfig& config, std::int64_t q_max) {
  check_config(config);
  if (q_max < 0) throw std::invalid_argument("w_min: q_max must be >= 0");
  return config.epsilon * f_value(config.spec, static_cast<double>(q_max)) /
         (2.0 * config.num_links);
}

double effective_weight(const WeightConfig& config, std::int64_t q_l, std::int64_t q_max) {
  check_config(config);
  if (q_l < 0) throw std::invalid_argument("effective_weight: q_l must be >= 0");
  if (q_l > q_max) throw std::invalid_argument("effective_weight: q_l exceeds q_max");
  const double w = f_value(config.spec, static_cast<double>(q_l));
  if (!config.use_wmin) return w;
  return std::max(w, w_min(config, q_max));
}

std::vector<double> effective_weights(const WeightConfig& config,
                                      const std::vector<std::int64_t>& queues) {
  if (queues.empty()) throw std::invalid_argument("effective_weights: empty queue vector");
  const std::int64_t q_max = *std::max_element(queues.begin(), queues.end());
  std::vector<double> out(queues.size());
  const double floor = config.use_wmin ? w_min(config, q_max) : 0.0;
  for (std::size_t i = 0; i < queues.size(); ++i) {
    if (queues[i] < 0) throw std::invalid_argument("effective_weights: negative queue");
    const double w = f_value(config.spec, static_cast<double>(queues[i]));
    out[i] = config.use_wmin ? std::max(w, floor) : w;
  }
  return out;
}

}  // namespace csma
