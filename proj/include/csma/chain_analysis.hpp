#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "csma/glauber.hpp"
#include "csma/weights.hpp"

namespace csma {

// Worst-case mixing-time bounds as functions of the link count and the
// largest effective weight. Values overflow doubles quickly, so the log
// is the primary representation; `value` is +inf when unrepresentable.
struct MixingBound {
  double log_value = 0.0;
  double value = 0.0;
};
MixingBound mixing_bound_single(int num_links, double wtilde_max);  // 16^N e^{4N w}
MixingBound mixing_bound_multi(int num_links, double wtilde_max);   // (64^N / 2) e^{4N w}

struct SpectralReport {
  std::vector<double> eigenvalues;  // descending, eigenvalues[0] ~ 1
  double lambda2 = 0.0;             // second largest
  double lambda_min = 0.0;
  double slem = 0.0;                // max(lambda2, |lambda_min|)
  double spectral_gap = 0.0;        // 1 - slem
  double mixing_time = 0.0;         // 1 / (1 - slem)
  MixingBound bound_single;         // worst-case bound at this N, wtilde_max
  MixingBound bound_multi;
  bool bound_holds = false;         // spectral_gap >= exp(-log bound) for the model's kind
  double detailed_balance_residual = 0.0;
};

// Eigensolve of the kernel via the similarity transform
// D^{1/2} P D^{-1/2} (symmetric for reversible kernels). Throws if the
// detailed-balance residual exceeds 1e-9.
SpectralReport slem(const ChainModel& model);

// Exhaustive conductance: min over nonempty state subsets B with
// pi(B) <= 1/2 of flow(B)/pi(B). Exponential in the state count, capped.
struct ConductanceResult {
  double phi = 0.0;
  std::vector<int> min_cut_states;  // state indices of the minimizing B
};
ConductanceResult conductance(const ChainModel& model, int max_states = 22);

// Lower bound on every eigenvalue: -1 + 2 * min_i P(i,i).
double gershgorin_floor(const ChainModel& model);

// Total variation distance between two probability vectors (each must
// sum to 1 within 1e-9).
double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// Chi-square-like norm sqrt(sum z_i^2 / pi_i); dominates 2*TV when
// z = p - q.
double pi_norm_inv(const Eigen::VectorXd& z, const Eigen::VectorXd& pi);

// Worst-case per-slot drift coefficient of the stationary law:
// 2N * f'(f^{-1}(w_min(q_max_next)) - 1). Throws if f^{-1}(w_min) < 1
// (the -1 shift would leave the domain).
double alpha_t(const WeightConfig& config, std::int64_t q_max_next);

// Slow-ramp condition alpha_t * T_bound <= delta/16, evaluated in log
// space so enormous mixing bounds don't overflow. When
// f^{-1}(w_min) < 1 the drift coefficient is evaluated with the -1 shift
// clamped to zero and shift_clamped is set.
struct AdiabaticReport {
  double alpha = 0.0;
  double log_alpha = 0.0;
  double log_mixing_bound = 0.0;
  double condition_lhs = 0.0;  // +inf when unrepresentable
  double log_condition_lhs = 0.0;
  double delta = 0.0;
  bool satisfied = false;
  bool shift_clamped = false;
};
AdiabaticReport adiabatic_condition(const WeightConfig& config, std::int64_t q_max, double delta,
                                    ChainKind kind);

// Closed-form switch-over thresholds. Magnitudes are astronomical, so
// q_threshold and b_threshold return log(1 + value) and t_star returns
// log(value). Supported kinds: the concave family (kLogOverLogLog via the
// general form, kLogPower via its closed form).
double q_threshold(int num_links, double epsilon, double delta, const WeightFunctionSpec& spec);
double t_star(int num_links, double epsilon, double delta, double theta, double log1p_q_th);
double b_threshold(int num_links, double epsilon, double delta, const WeightFunctionSpec& spec,
                   double log1p_q_th, double log_t_star);

// Exact distribution propagation through a sequence of single-site
// kernels. Step k applies the kernel built from weight_trace[k]:
//   mu_{k+1} = mu_k P_k,   pi_k = stationary(weight_trace[k]).
// Reported per step: mu (after the step), pi, tv(mu, pi), the 1/pi-norm
// of (mu - pi), the one-step-lookahead norm a_next = |mu_{k+2} - pi_k|
// in the 1/pi_k norm (NaN on the last step), and the step kernel's slem
// and mixing time.
struct PropagationStep {
  Eigen::VectorXd mu;
  Eigen::VectorXd pi;
  double tv = 0.0;
  double norm_dist = 0.0;
  double a_next = 0.0;
  double sigma = 0.0;
  double mixing_time = 0.0;
};
std::vector<PropagationStep> propagate_distribution(
    const ConflictGraph& graph, const std::vector<std::vector<double>>& weight_trace,
    const Eigen::VectorXd& mu0, int cap = ConflictGraph::kDefaultEnumerationCap);

// First slot t with sum_{k<=t} 1/T_k^2 >= log(4/delta) + N(wmax0+log 2)/2,
// the warm-up after which a slow ramp's law stays close; nullopt if the
// trace never accumulates enough.
std::optional<std::int64_t> adiabatic_warmup_slot(const std::vector<double>& mixing_times,
                                                  double delta, int num_links, double wmax0);

}  // namespace csma
