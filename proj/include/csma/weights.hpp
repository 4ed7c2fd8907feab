#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace csma {

// Queue-length weight functions w = f(q). The two concave slowly-growing
// kinds (kLogOverLogLog, kLogPower) are the ones the scheduling guarantees
// cover; kLogLog is the slower comparison kind, and kLinear / kSqrt are
// fast-growing kinds kept for instability demonstrations.
enum class WeightKind { kLogOverLogLog, kLogPower, kLogLog, kLinear, kSqrt };

struct WeightFunctionSpec {
  WeightKind kind = WeightKind::kLogOverLogLog;
  double theta = 0.5;  // kLogPower only, must lie in (0,1)

  static WeightFunctionSpec log_over_loglog() { return {WeightKind::kLogOverLogLog, 0.0}; }
  static WeightFunctionSpec log_power(double theta);
  static WeightFunctionSpec loglog() { return {WeightKind::kLogLog, 0.0}; }
  static WeightFunctionSpec linear() { return {WeightKind::kLinear, 0.0}; }
  static WeightFunctionSpec sqrt() { return {WeightKind::kSqrt, 0.0}; }

  // the kinds of the form log(1+q)/g(q) covered by the concavity and
  // threshold machinery
  bool concave_family() const {
    return kind == WeightKind::kLogOverLogLog || kind == WeightKind::kLogPower;
  }
};

std::string weight_kind_name(const WeightFunctionSpec& spec);

// f, f', f^{-1}; natural logs throughout. f_prime returns +inf where the
// one-sided derivative diverges (kLogPower and kSqrt at q = 0).
double f_value(const WeightFunctionSpec& spec, double q);
double f_prime(const WeightFunctionSpec& spec, double q);
double f_inverse(const WeightFunctionSpec& spec, double w);

// Log-space companions used by the threshold formulas, where f^{-1}
// outputs overflow doubles: everything is expressed via L = log(1+q).
double f_at_log1p(const WeightFunctionSpec& spec, double L);      // f(q) given L
double log1p_f_inverse(const WeightFunctionSpec& spec, double w); // log(1+f^{-1}(w))
double log_f_prime_at_log1p(const WeightFunctionSpec& spec, double L);  // log f'(q) given L

// The denominator g in f = log(1+q)/g(q); defined for the concave family
// only (throws otherwise). g_inverse(z) solves g(q) = z; the log1p variant
// returns log(1+g_inverse(z)) without materializing the inverse.
double g_value(const WeightFunctionSpec& spec, double q);
double g_inverse(const WeightFunctionSpec& spec, double z);
double log1p_g_inverse(const WeightFunctionSpec& spec, double z);

// Per-run weight configuration. epsilon is the throughput slack; the
// floor w_min = epsilon*f(q_max)/(2N) is applied to every link's weight
// only when use_wmin is set (the practical variant runs on f directly).
struct WeightConfig {
  WeightFunctionSpec spec;
  double epsilon = 0.2;
  int num_links = 1;
  bool use_wmin = true;
};

// The floor value epsilon*f(q_max)/(2N) itself (independent of use_wmin).
double w_min(const WeightConfig& config, std::int64_t q_max);

// w~_l = max(f(q_l), w_min) under use_wmin, else f(q_l).
// Throws if q_l < 0 or q_l > q_max.
double effective_weight(const WeightConfig& config, std::int64_t q_l, std::int64_t q_max);
std::vector<double> effective_weights(const WeightConfig& config,
                                      const std::vector<std::int64_t>& queues);

}  // namespace csma
