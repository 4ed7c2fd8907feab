#include "csma/distributed_mac.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace csma {

Schedule decision_bernoulli(const ConflictGraph& graph, SeededRng& rng) {
  const int n = graph.num_links();
  Schedule sent(n);
  for (int l = 0; l < n; ++l) sent.set(l, rng.uniform01() < 0.5);
  Schedule decision(n);
  for (int l = 0; l < n; ++l)
    if (sent.test(l) && !graph.neighbor_mask(l).intersects(sent)) decision.set(l);
  return decision;
}

Schedule windowed_resolution(const ConflictGraph& graph, int window,
                             const std::vector<int>& backoff) {
  const int n = graph.num_links();
  if (window < 1) throw std::invalid_argument("windowed_resolution: window must be >= 1");
  if (static_cast<int>(backoff.size()) != n)
    throw std::invalid_argument("windowed_resolution: backoff size mismatch");
  for (int b : backoff)
    if (b < 0 || b >= window) throw std::invalid_argument("windowed_resolution: backoff out of window");

  Schedule decision(n);
  std::vector<bool> withdrawn(n, false);
  for (int slot = 0; slot < window; ++slot) {
    Schedule senders(n);
    for (int l = 0; l < n; ++l)
      if (backoff[l] == slot && !withdrawn[l]) senders.set(l);
    if (senders.none()) continue;
    for (int l : senders.indices())
      if (!graph.neighbor_mask(l).intersects(senders)) decision.set(l);
    for (int l = 0; l < n; ++l)
      if (!withdrawn[l] && backoff[l] > slot && graph.neighbor_mask(l).intersects(senders))
        withdrawn[l] = true;
  }
  return decision;
}

Schedule decision_windowed(const ConflictGraph& graph, int window, SeededRng& rng) {
  const int n = graph.num_links();
  std::vector<int> backoff(n);
  for (int l = 0; l < n; ++l) backoff[l] = rng.uniform_int(window);
  return windowed_resolution(graph, window, backoff);
}

DecisionDistribution enumerate_decision_distribution(const ConflictGraph& graph,
                                                     const MacConfig& config) {
  const int n = graph.num_links();
  std::map<Schedule, double> acc;
  if (config.mechanism == MacMechanism::kBernoulliHalf) {
    if (n > 12)
      throw std::invalid_argument("enumerate_decision_distribution: bernoulli enumeration capped at 12 links");
    const double p = std::ldexp(1.0, -n);  // 2^-n
    for (std::uint64_t pattern = 0; pattern < (1ULL << n); ++pattern) {
      Schedule sent(n);
      for (int l = 0; l < n; ++l)
        if ((pattern >> l) & 1ULL) sent.set(l);
      Schedule decision(n);
      for (int l = 0; l < n; ++l)
        if (sent.test(l) && !graph.neighbor_mask(l).intersects(sent)) decision.set(l);
      acc[decision] += p;
    }
  } else {
    const int w = config.window;
    if (w < 1) throw std::invalid_argument("enumerate_decision_distribution: window must be >= 1");
    const double vectors = std::pow(static_cast<double>(w), n);
    if (vectors > static_cast<double>(1ULL << 30))
      throw std::invalid_argument("enumerate_decision_distribution: window^links exceeds enumeration cap");
    const double p = 1.0 / vectors;
    std::vector<int> backoff(n, 0);
    while (true) {
      acc[windowed_resolution(graph, w, backoff)] += p;
      int pos = 0;
      while (pos < n && ++backoff[pos] == w) backoff[pos++] = 0;
      if (pos == n) break;
    }
  }
  DecisionDistribution out(acc.begin(), acc.end());  // canonical order via map
  return out;
}

double capacity_fraction(double data_slot, double control_slot) {
  if (!(data_slot > 0) || !(control_slot >= 0))
    throw std::invalid_argument("capacity_fraction: need data_slot > 0 and control_slot >= 0");
  return data_slot / (data_slot + control_slot);
}

}  // namespace csma
