#pragma once

#include <vector>

#include "csma/conflict_graph.hpp"
#include "csma/glauber.hpp"
#include "csma/rng.hpp"

namespace csma {

// Contention mechanisms that pick each slot's decision schedule without
// central coordination. Both always produce an independent set.
enum class MacMechanism { kBernoulliHalf, kWindowed };

struct MacConfig {
  MacMechanism mechanism = MacMechanism::kWindowed;
  int window = 32;           // control mini-slots per data slot (windowed only)
  double data_slot = 1.0;    // data portion length, capacity accounting only
  double control_slot = 1.0; // control portion length, capacity accounting only
};

// Coin-flip contention: every link sends an INTENT with probability 1/2
// (one uniform per link, ascending order); a link enters the decision
// schedule iff it sent and heard no neighbor INTENT. Sender-only
// inclusion keeps the schedule independent and gives every independent
// set probability at least (1/2)^N.
Schedule decision_bernoulli(const ConflictGraph& graph, SeededRng& rng);

// Windowed contention: every link draws a backoff T uniformly from
// {0..window-1} (one uniform per link, ascending order). Mini-slots run
// in order; a link that has heard any earlier neighbor transmission
// withdraws, a link whose backoff expires transmits an INTENT, and it
// enters the decision schedule iff no neighbor transmitted in the same
// mini-slot. Colliding links transmit (silencing later neighbors) but are
// not included.
Schedule decision_windowed(const ConflictGraph& graph, int window, SeededRng& rng);

// Deterministic resolution of the windowed mechanism for a given backoff
// vector; decision_windowed draws backoffs and delegates here.
Schedule windowed_resolution(const ConflictGraph& graph, int window,
                             const std::vector<int>& backoff);

// Exact decision-schedule distribution by enumerating the mechanism's
// randomness: 2^N send patterns for kBernoulliHalf (N <= 12), window^N
// backoff vectors for kWindowed (window^N <= 2^30). Support is returned
// in canonical schedule order with probabilities summing to one.
DecisionDistribution enumerate_decision_distribution(const ConflictGraph& graph,
                                                     const MacConfig& config);

// Fraction of a slot usable for data when each slot spends control_slot
// on contention: data_slot / (data_slot + control_slot).
double capacity_fraction(double data_slot, double control_slot);

}  // namespace csma
