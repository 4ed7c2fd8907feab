#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "csma/conflict_graph.hpp"
#include "csma/distributed_mac.hpp"
#include "csma/glauber.hpp"
#include "csma/rng.hpp"
#include "csma/weights.hpp"

namespace csma {

// Arrival process: either direct per-link Bernoulli rates, or the scaled
// convex-combination form lambda_l = rho * sum_i c_i * [l in M_i].
struct StructuredArrivals {
  double rho = 0.0;
  std::vector<std::pair<Schedule, double>> components;  // (M_i, c_i)
};

struct ArrivalConfig {
  std::optional<std::vector<double>> lambda;
  std::optional<StructuredArrivals> structured;

  static ArrivalConfig direct(std::vector<double> rates);
  static ArrivalConfig scaled(double rho, std::vector<std::pair<Schedule, double>> components);
};

// Per-link rates; validates coefficients (nonnegative, sum 1, schedules
// independent and sized to the graph) and requires every rate < 1.
std::vector<double> expand_arrivals(const ArrivalConfig& config, const ConflictGraph& graph);

// Independent Bernoulli(lambda_l) draws, one uniform01 per link in order.
std::vector<std::uint8_t> sample_arrivals(const std::vector<double>& lambda, SeededRng& rng);

// q_l <- (q_l - x_l)^+ + a_l, positive-part service before the arrival add.
void queue_update(std::vector<std::int64_t>& queues, const Schedule& schedule,
                  const std::vector<std::uint8_t>& arrivals);

// Exact max-weight independent set, branch and bound, N <= 32. Ties break
// toward the canonically smallest schedule, so results are deterministic.
struct MwsResult {
  Schedule schedule;
  double weight = 0.0;
};
MwsResult mws_oracle(const ConflictGraph& graph, const std::vector<double>& weights);

struct SlotRecord {
  std::int64_t t = 0;
  Schedule schedule;
  Schedule decision;  // distributed mode; empty in basic mode
  std::vector<std::uint8_t> arrivals;
  std::vector<std::int64_t> queues;
  double achieved_weight = 0.0;
  bool has_oracle = false;
  double oracle_weight = 0.0;  // valid when has_oracle
  bool in_chi = false;         // achieved < (1-eps)*oracle, valid when has_oracle
};

struct OracleSample {
  std::int64_t t = 0;
  double achieved = 0.0;
  double wstar = 0.0;
};

struct RunOptions {
  std::int64_t horizon = 1;
  std::uint64_t seed = 1;
  std::int64_t record_every = 0;  // 0 disables per-slot records
  bool frozen = false;            // freeze queues/weights: pure chain sampler
  std::vector<std::int64_t> q0;   // empty = all zeros
  std::int64_t oracle_every = 0;  // 0 disables the MWS oracle
  double chi_epsilon = 0.2;       // slack used for the in_chi flag
  bool count_schedules = false;   // tally per-schedule visit counts
  int num_buckets = 50;           // mean-queue buckets over the horizon
};

struct RunResult {
  std::int64_t horizon = 0;
  std::vector<SlotRecord> records;
  std::vector<std::int64_t> final_queues;
  std::vector<double> mean_queue;       // per-link time average
  std::vector<double> service_rate;     // realized departures per slot
  std::vector<double> arrival_rate;     // realized arrivals per slot
  double time_avg_queue = 0.0;          // avg over slots of (sum_l q_l)/N
  std::vector<double> bucket_avg_queue; // same quantity averaged per bucket
  std::int64_t max_total_queue = 0;
  std::int64_t max_link_queue = 0;
  std::vector<OracleSample> oracle_samples;
  std::map<Schedule, std::int64_t> schedule_counts;  // when enabled
};

// Optional per-slot hook (slot, schedule after the step, queues after update).
using SlotObserver =
    std::function<void(std::int64_t, const Schedule&, const std::vector<std::int64_t>&)>;

// Decision-schedule generator for run_distributed_with; must return an
// independent set. Receives the slot index and the MAC RNG stream.
using DecisionFn = std::function<Schedule(std::int64_t, SeededRng&)>;

// Basic algorithm: one single-site chain step per slot, weights recomputed
// from the previous slot's queues; then service and arrivals.
RunResult run_basic(const ConflictGraph& graph, const WeightConfig& weights,
                    const ArrivalConfig& arrivals, const RunOptions& options,
                    const SlotObserver& observer = nullptr);

// Distributed algorithm: control phase picks a decision schedule via the
// MAC mechanism, every decision link resamples simultaneously, then
// service and arrivals.
RunResult run_distributed(const ConflictGraph& graph, const WeightConfig& weights,
                          const ArrivalConfig& arrivals, const MacConfig& mac,
                          const RunOptions& options, const SlotObserver& observer = nullptr);

// Same loop with a caller-supplied decision generator.
RunResult run_distributed_with(const ConflictGraph& graph, const WeightConfig& weights,
                               const ArrivalConfig& arrivals, const DecisionFn& decisions,
                               const RunOptions& options, const SlotObserver& observer = nullptr);

// Fraction of oracle samples whose achieved weight fell below
// (1-epsilon) * w*. Throws if the run collected no samples.
double chi_fraction(const RunResult& result, double epsilon);

struct StabilityMetrics {
  std::vector<double> avg_queue_series;  // (sum_l q_l)/N per recorded slot
  double time_avg_queue = 0.0;
  std::vector<double> lyapunov_series;   // sqrt(sum_l f(q_l)^2) per recorded slot
};

// Needs per-slot records (record_every > 0 in the producing run).
StabilityMetrics stability_metrics(const RunResult& result, const WeightFunctionSpec& spec);

}  // namespace csma
