#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "csma/conflict_graph.hpp"
#include "csma/rng.hpp"

namespace csma {

// One property suite's outcome: how many instances were checked, how many
// violated the property, and the worst margin observed (suite-specific,
// but always "bigger = closer to failing").
struct SuiteResult {
  std::string name;
  bool passed = false;
  std::int64_t checks = 0;
  std::int64_t failures = 0;
  double worst = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 0x5EEDC0DEULL;
};

// Conflict-graph factories used by the corpora (n counts links).
ConflictGraph path_graph(int n);
ConflictGraph cycle_graph(int n);
ConflictGraph star_graph(int leaves);  // hub is link 0, N = leaves + 1
ConflictGraph complete_graph(int n);
ConflictGraph random_graph(int n, double edge_prob, SeededRng& rng);

// Independent left-fixed-point oracle: general (non-symmetric) eigensolve
// of kernel^T, eigenvector at eigenvalue 1 normalized to a probability
// vector. Deliberately does not reuse the product-form law or the
// symmetrized spectral path.
Eigen::VectorXd left_fixed_point(const Eigen::MatrixXd& kernel);

// concave-family sandwich (1-eps)f(q) <= f(q-M1) <= f(q+M2) <= (1+eps)f(q)
// holds beyond a discovered threshold Q for M1=M2=5, eps=0.1
SuiteResult suite_weight_sandwich();
// f'(q) <= 1/(1+q) globally for the log family; linear and sqrt weights
// provably violate it (they are simulation-only kinds)
SuiteResult suite_weight_derivative_bound();
// exact single-site kernels: fixed point == product form, per entry 1e-9
SuiteResult suite_stationary_single_exact(const VerifyOptions& options = {});
// frozen-queue single-site simulation matches the product form, TV <= 0.01
SuiteResult suite_stationary_single_sim(const VerifyOptions& options = {});
// exact parallel kernels under Bernoulli-1/2 decisions: same fixed point
SuiteResult suite_stationary_multi_exact(const VerifyOptions& options = {});
// frozen-queue distributed simulation matches the product form
SuiteResult suite_stationary_multi_sim(const VerifyOptions& options = {});
// sigma <= 1 - 16^{-N} e^{-4N wmax} on 200 random instances
SuiteResult suite_mixing_bound_single(const VerifyOptions& options = {});
// sigma <= 1 - 2 * 64^{-N} e^{-4N wmax} on 200 random instances
SuiteResult suite_mixing_bound_multi(const VerifyOptions& options = {});
// exhaustive conductance: 1-2phi <= lambda2 <= 1-phi^2/2, Gershgorin floor,
// sigma == lambda2, stationary floor min pi >= 1/(r e^{N wmax})
SuiteResult suite_conductance_bounds(const VerifyOptions& options = {});
// product-form drift: per-link weight change <= alpha/2N implies
// ||pi' - pi||_{1/pi'} <= 2 alpha for alpha < 1
SuiteResult suite_drift_bound(const VerifyOptions& options = {});

// canonical suite table: name -> entry point, in execution order
struct SuiteEntry {
  std::string name;
  SuiteResult (*run)(const VerifyOptions&);
};
const std::vector<SuiteEntry>& suite_registry();

std::vector<SuiteResult> run_all_suites(const VerifyOptions& options = {});

}  // namespace csma
