#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "csma/conflict_graph.hpp"
#include "csma/rng.hpp"

namespace csma {

enum class ChainKind { kSingleSite, kMultiSite };

struct ChainState {
  Schedule schedule;
  std::int64_t slot = 0;
};

// Probability that a link with effective weight w comes up active when it
// resamples with a free neighborhood: exp(w) / (1 + exp(w)).
double activation_probability(double wtilde);

// One slot of single-site dynamics: pick a link uniformly; if its whole
// neighborhood was inactive in the previous schedule it resamples
// (active with activation_probability), otherwise it is forced inactive.
// All other links are frozen.
//
// RNG consumption per call is fixed: one uniform_int for the link choice,
// then one uniform01 for the activation draw (consumed even when the
// neighborhood forces the link off), so traces are seed-stable.
ChainState single_site_step(const ConflictGraph& graph, const ChainState& state,
                            const std::vector<double>& wtilde, SeededRng& rng);

// One slot of multi-site dynamics: every link in the decision schedule
// resamples simultaneously (neighborhood test against the previous
// schedule); links outside the decision schedule are frozen. The decision
// schedule must be independent.
//
// RNG consumption: one uniform01 per decision-schedule member, in
// ascending link order.
ChainState multi_site_step(const ConflictGraph& graph, const ChainState& state,
                           const std::vector<double>& wtilde, const Schedule& decision,
                           SeededRng& rng);

// Distribution over decision schedules, support paired with probability.
// Produced by the MAC layer or built by hand in tests.
using DecisionDistribution = std::vector<std::pair<Schedule, double>>;

// Exact finite-chain model over the enumerated independent sets, states
// in canonical order.
struct ChainModel {
  ChainKind kind = ChainKind::kSingleSite;
  int num_links = 0;
  double wtilde_max = 0.0;
  std::vector<Schedule> states;
  Eigen::MatrixXd kernel;      // row-stochastic
  Eigen::VectorXd stationary;  // product-form law

  int index_of(const Schedule& s) const;
  // row sums, stationarity, positivity, detailed balance
  void validate(double tol = 1e-12) const;
};

// Product-form stationary law pi(rho) ∝ exp(sum of wtilde over rho),
// normalized by log-sum-exp; indexed in canonical state order.
Eigen::VectorXd stationary_distribution(const ConflictGraph& graph,
                                        const std::vector<double>& wtilde,
                                        int cap = ConflictGraph::kDefaultEnumerationCap);

ChainModel transition_matrix_single(const ConflictGraph& graph,
                                    const std::vector<double>& wtilde,
                                    int cap = ConflictGraph::kDefaultEnumerationCap);

// Kernel entries are assembled from the closed-form product over the
// decision distribution: for each decision schedule m containing the
// changed links, free links not kept pay 1/(1+e^w), kept links pay
// e^w/(1+e^w), links silenced by an active neighborhood contribute 1.
// Every support schedule must be independent and probabilities must sum
// to one.
ChainModel transition_matrix_multi(const ConflictGraph& graph, const std::vector<double>& wtilde,
                                   const DecisionDistribution& decisions,
                                   int cap = ConflictGraph::kDefaultEnumerationCap);

}  // namespace csma
