#include "csma/network_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csma {

namespace {

void check_options(const ConflictGraph& graph, const WeightConfig& weights,
                   const RunOptions& options) {
  if (weights.num_links != graph.num_links())
    throw std::invalid_argument("run: weight config sized for a different graph");
  if (options.horizon < 1) throw std::invalid_argument("run: horizon must be >= 1");
  if (options.record_every < 0) throw std::invalid_argument("run: record_every must be >= 0");
  if (options.oracle_every < 0) throw std::invalid_argument("run: oracle_every must be >= 0");
  if (options.num_buckets < 1) throw std::invalid_argument("run: num_buckets must be >= 1");
  if (options.oracle_every > 0 && !(options.chi_epsilon > 0 && options.chi_epsilon < 1))
    throw std::invalid_argument("run: chi_epsilon must lie in (0,1) when the oracle is on");
  if (!options.q0.empty()) {
    if (static_cast<int>(options.q0.size()) != graph.num_links())
      throw std::invalid_argument("run: q0 size mismatch");
    for (std::int64_t q : options.q0)
      if (q < 0) throw std::invalid_argument("run: q0 entries must be >= 0");
  }
}

// Shared slot loop. step(x, wtilde, t) -> (new schedule, decision used).
template <typename Stepper>
RunResult run_loop(const ConflictGraph& graph, const WeightConfig& weights,
                   const ArrivalConfig& arrivals, const RunOptions& options,
                   const SlotObserver& observer, Stepper&& step) {
  check_options(graph, weights, options);
  const int n = graph.num_links();
  const std::vector<double> lambda =
      options.frozen ? std::vector<double>(n, 0.0) : expand_arrivals(arrivals, graph);

  SeededRng root(options.seed);
  SeededRng arrival_rng = root.stream(1);

  std::vector<std::int64_t> q =
      options.q0.empty() ? std::vector<std::int64_t>(n, 0) : options.q0;
  Schedule x(n);

  std::vector<double> frozen_weights;
  if (options.frozen) frozen_weights = effective_weights(weights, q);

  RunResult result;
  result.horizon = options.horizon;
  result.mean_queue.assign(n, 0.0);
  result.service_rate.assign(n, 0.0);
  result.arrival_rate.assign(n, 0.0);
  result.bucket_avg_queue.assign(options.num_buckets, 0.0);
  std::vector<std::int64_t> bucket_count(options.num_buckets, 0);
  std::vector<std::uint8_t> no_arrivals(n, 0);

  for (std::int64_t t = 1; t <= options.horizon; ++t) {
    const std::vector<double>& wtilde =
        options.frozen ? frozen_weights : effective_weights(weights, q);

    auto [next, decision] = step(x, wtilde, t);
    x = std::move(next);

    std::vector<std::uint8_t> a = options.frozen ? no_arrivals : sample_arrivals(lambda, arrival_rng);
    if (!options.frozen) {
      for (int l = 0; l < n; ++l) {
        if (x.test(l) && q[l] > 0) result.service_rate[l] += 1.0;
        result.arrival_rate[l] += a[l];
      }
      queue_update(q, x, a);
    }

    double achieved = 0.0;
    for (int l = 0; l < n; ++l)
      if (x.test(l)) achieved += wtilde[l];

    bool has_oracle = false;
    double wstar = 0.0;
    if (options.oracle_every > 0 && t % options.oracle_every == 0) {
      has_oracle = true;
      wstar = mws_oracle(graph, wtilde).weight;
      result.oracle_samples.push_back({t, achieved, wstar});
    }

    std::int64_t total = 0;
    for (int l = 0; l < n; ++l) {
      total += q[l];
      result.mean_queue[l] += static_cast<double>(q[l]);
      result.max_link_queue = std::max(result.max_link_queue, q[l]);
    }
    result.max_total_queue = std::max(result.max_total_queue, total);
    const double avg = static_cast<double>(total) / n;
    result.time_avg_queue += avg;
    const std::int64_t bucket = (t - 1) * options.num_buckets / options.horizon;
    result.bucket_avg_queue[bucket] += avg;
    ++bucket_count[bucket];

    if (options.count_schedules) ++result.schedule_counts[x];

    if (options.record_every > 0 && t % options.record_every == 0) {
      SlotRecord rec;
      rec.t = t;
      rec.schedule = x;
      rec.decision = decision;
      rec.arrivals = a;
      rec.queues = q;
      rec.achieved_weight = achieved;
      rec.has_oracle = has_oracle;
      rec.oracle_weight = wstar;
      rec.in_chi = has_oracle && achieved < (1.0 - options.chi_epsilon) * wstar;
      result.records.push_back(std::move(rec));
    }
    if (observer) observer(t, x, q);
  }

  for (int l = 0; l < n; ++l) {
    result.mean_queue[l] /= static_cast<double>(options.horizon);
    result.service_rate[l] /= static_cast<double>(options.horizon);
    result.arrival_rate[l] /= static_cast<double>(options.horizon);
  }
  result.time_avg_queue /= static_cast<double>(options.horizon);
  for (int b = 0; b < options.num_buckets; ++b)
    if (bucket_count[b] > 0) result.bucket_avg_queue[b] /= static_cast<double>(bucket_count[b]);
  result.final_queues = std::move(q);
  return result;
}

}  // namespace

ArrivalConfig ArrivalConfig::direct(std::vector<double> rates) {
  ArrivalConfig c;
  c.lambda = std::move(rates);
  return c;
}

ArrivalConfig ArrivalConfig::scaled(double rho,
                                    std::vector<std::pair<Schedule, double>> components) {
  ArrivalConfig c;
  c.structured = StructuredArrivals{rho, std::move(components)};
  return c;
}

std::vector<double> expand_arrivals(const ArrivalConfig& config, const ConflictGraph& graph) {
  const int n = graph.num_links();
  std::vector<double> rates;
  if (config.lambda.has_value() == config.structured.has_value())
    throw std::invalid_argument("arrivals: exactly one of lambda/structured must be set");

  if (config.lambda) {
    rates = *config.lambda;
    if (static_cast<int>(rates.size()) != n)
      throw std::invalid_argument("arrivals: rate vector size mismatch");
  } else {
    const StructuredArrivals& s = *config.structured;
    if (!(s.rho >= 0 && s.rho < 1))
      throw std::invalid_argument("arrivals: rho must lie in [0,1)");
    if (s.components.empty()) throw std::invalid_argument("arrivals: no components");
    double csum = 0.0;
    rates.assign(n, 0.0);
    for (const auto& [sched, c] : s.components) {
      if (sched.num_links() != n)
        throw std::invalid_argument("arrivals: component schedule size mismatch");
      if (!graph.is_independent(sched))
        throw std::invalid_argument("arrivals: component schedule is not independent");
      if (!(c >= 0)) throw std::invalid_argument("arrivals: coefficients must be >= 0");
      csum += c;
      for (int l = 0; l < n; ++l)
        if (sched.test(l)) rates[l] += s.rho * c;
    }
    if (std::abs(csum - 1.0) > 1e-9)
      throw std::invalid_argument("arrivals: coefficients must sum to 1");
  }
  for (double r : rates)
    if (!(r >= 0 && r < 1)) throw std::invalid_argument("arrivals: each rate must lie in [0,1)");
  return rates;
}

std::vector<std::uint8_t> sample_arrivals(const std::vector<double>& lambda, SeededRng& rng) {
  std::vector<std::uint8_t> a(lambda.size());
  for (std::size_t l = 0; l < lambda.size(); ++l) a[l] = rng.bernoulli(lambda[l]) ? 1 : 0;
  return a;
}

void queue_update(std::vector<std::int64_t>& queues, const Schedule& schedule,
                  const std::vector<std::uint8_t>& arrivals) {
  if (schedule.num_links() != static_cast<int>(queues.size()) ||
      arrivals.size() != queues.size())
    throw std::invalid_argument("queue_update: size mismatch");
  for (std::size_t l = 0; l < queues.size(); ++l) {
    std::int64_t q = queues[l];
    if (schedule.test(static_cast<int>(l)) && q > 0) --q;
    queues[l] = q + arrivals[l];
  }
}

MwsResult mws_oracle(const ConflictGraph& graph, const std::vector<double>& weights) {
  const int n = graph.num_links();
  if (n > 32) throw std::invalid_argument("mws_oracle: supports at most 32 links");
  if (static_cast<int>(weights.size()) != n)
    throw std::invalid_argument("mws_oracle: weight vector size mismatch");
  for (double w : weights)
    if (!std::isfinite(w)) throw std::invalid_argument("mws_oracle: weights must be finite");

  // up[i]: best possible gain from links 0..i
  std::vector<double> up(n, 0.0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += std::max(0.0, weights[i]);
    up[i] = acc;
  }
  std::vector<std::uint64_t> nb(n);
  for (int l = 0; l < n; ++l) nb[l] = graph.neighbor_mask(l).low_word();

  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
  // Decide links high index to low, exclude branch first: leaves arrive in
  // ascending canonical order, so with strict improvement the first
  // maximizer found is the canonically smallest. Pruning on <= is safe for
  // the same reason (a tied branch can only yield larger schedules).
  auto dfs = [&](auto&& self, int i, std::uint64_t chosen, std::uint64_t blocked,
                 double cur) -> void {
    if (i < 0) {
      if (cur > best) {
        best = cur;
        best_mask = chosen;
      }
      return;
    }
    if (cur + up[i] <= best) return;
    self(self, i - 1, chosen, blocked, cur);
    if (!((blocked >> i) & 1ULL))
      self(self, i - 1, chosen | (1ULL << i), blocked | nb[i], cur + weights[i]);
  };
  dfs(dfs, n - 1, 0, 0, 0.0);

  MwsResult result;
  result.schedule = Schedule(n);
  for (int l = 0; l < n; ++l)
    if ((best_mask >> l) & 1ULL) result.schedule.set(l);
  result.weight = best;
  return result;
}

RunResult run_basic(const ConflictGraph& graph, const WeightConfig& weights,
                    const ArrivalConfig& arrivals, const RunOptions& options,
                    const SlotObserver& observer) {
  SeededRng chain_rng = SeededRng(options.seed).stream(0);
  const Schedule no_decision(graph.num_links());
  return run_loop(graph, weights, arrivals, options, observer,
                  [&](const Schedule& x, const std::vector<double>& wtilde, std::int64_t t) {
                    ChainState state{x, t - 1};
                    ChainState next = single_site_step(graph, state, wtilde, chain_rng);
                    return std::pair<Schedule, Schedule>(next.schedule, no_decision);
                  });
}

RunResult run_distributed_with(const ConflictGraph& graph, const WeightConfig& weights,
                               const ArrivalConfig& arrivals, const DecisionFn& decisions,
                               const RunOptions& options, const SlotObserver& observer) {
  if (!decisions) throw std::invalid_argument("run_distributed_with: null decision function");
  SeededRng chain_rng = SeededRng(options.seed).stream(0);
  SeededRng mac_rng = SeededRng(options.seed).stream(2);
  return run_loop(graph, weights, arrivals, options, observer,
                  [&](const Schedule& x, const std::vector<double>& wtilde, std::int64_t t) {
                    Schedule decision = decisions(t, mac_rng);
                    ChainState state{x, t - 1};
                    ChainState next = multi_site_step(graph, state, wtilde, decision, chain_rng);
                    return std::pair<Schedule, Schedule>(next.schedule, std::move(decision));
                  });
}

RunResult run_distributed(const ConflictGraph& graph, const WeightConfig& weights,
                          const ArrivalConfig& arrivals, const MacConfig& mac,
                          const RunOptions& options, const SlotObserver& observer) {
  if (mac.mechanism == MacMechanism::kWindowed && mac.window < 1)
    throw std::invalid_argument("run_distributed: window must be >= 1");
  DecisionFn decisions = [&graph, mac](std::int64_t, SeededRng& rng) {
    return mac.mechanism == MacMechanism::kBernoulliHalf
               ? decision_bernoulli(graph, rng)
               : decision_windowed(graph, mac.window, rng);
  };
  return run_distributed_with(graph, weights, arrivals, decisions, options, observer);
}

double chi_fraction(const RunResult& result, double epsilon) {
  if (!(epsilon > 0 && epsilon < 1))
    throw std::invalid_argument("chi_fraction: epsilon must lie in (0,1)");
  if (result.oracle_samples.empty())
    throw std::invalid_argument("chi_fraction: run collected no oracle samples");
  std::int64_t hits = 0;
  for (const OracleSample& s : result.oracle_samples)
    if (s.achieved < (1.0 - epsilon) * s.wstar) ++hits;
  return static_cast<double>(hits) / static_cast<double>(result.oracle_samples.size());
}

StabilityMetrics stability_metrics(const RunResult& result, const WeightFunctionSpec& spec) {
  if (result.records.empty())
    throw std::invalid_argument("stability_metrics: run has no per-slot records");
  StabilityMetrics m;
  m.avg_queue_series.reserve(result.records.size());
  m.lyapunov_series.reserve(result.records.size());
  for (const SlotRecord& rec : result.records) {
    const int n = static_cast<int>(rec.queues.size());
    double total = 0.0, sq = 0.0;
    for (std::int64_t q : rec.queues) {
      total += static_cast<double>(q);
      const double f = f_value(spec, static_cast<double>(q));
      sq += f * f;
    }
    m.avg_queue_series.push_back(total / n);
    m.lyapunov_series.push_back(std::sqrt(sq));
  }
  m.time_avg_queue = result.time_avg_queue;
  return m;
}

}  // namespace csma
