#include "csma/chain_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace csma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double logaddexp(double x, double y) {
  if (x == -kInf) return y;
  if (y == -kInf) return x;
  const double m = std::max(x, y);
  if (std::isinf(m)) return m;
  return m + std::log1p(std::exp(std::min(x, y) - m));
}

double db_residual(const ChainModel& model) {
  const int r = static_cast<int>(model.states.size());
  double res = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      res = std::max(res, std::abs(model.stationary[i] * model.kernel(i, j) -
                                   model.stationary[j] * model.kernel(j, i)));
  return res;
}

void check_threshold_args(int num_links, double epsilon, double delta) {
  if (num_links < 1) throw std::invalid_argument("thresholds: num_links must be >= 1");
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("thresholds: epsilon must lie in (0,1)");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("thresholds: delta must lie in (0,1)");
}

}  // namespace

MixingBound mixing_bound_single(int num_links, double wtilde_max) {
  if (num_links < 1) throw std::invalid_argument("mixing_bound_single: num_links must be >= 1");
  if (!(wtilde_max >= 0)) throw std::invalid_argument("mixing_bound_single: wtilde_max must be >= 0");
  MixingBound b;
  b.log_value = num_links * std::log(16.0) + 4.0 * num_links * wtilde_max;
  b.value = b.log_value < 700 ? std::exp(b.log_value) : kInf;
  return b;
}

MixingBound mixing_bound_multi(int num_links, double wtilde_max) {
  if (num_links < 1) throw std::invalid_argument("mixing_bound_multi: num_links must be >= 1");
  if (!(wtilde_max >= 0)) throw std::invalid_argument("mixing_bound_multi: wtilde_max must be >= 0");
  MixingBound b;
  b.log_value = num_links * std::log(64.0) - std::log(2.0) + 4.0 * num_links * wtilde_max;
  b.value = b.log_value < 700 ? std::exp(b.log_value) : kInf;
  return b;
}

SpectralReport slem(const ChainModel& model) {
  const int r = static_cast<int>(model.states.size());
  if (r < 1) throw std::invalid_argument("slem: empty model");
  SpectralReport report;
  report.detailed_balance_residual = db_residual(model);
  if (report.detailed_balance_residual > 1e-9)
    throw std::runtime_error("slem: kernel is not reversible (detailed balance residual > 1e-9)");

  // D^{1/2} P D^{-1/2}; symmetric up to roundoff for reversible P
  Eigen::VectorXd sqrt_pi = model.stationary.array().sqrt();
  Eigen::MatrixXd s(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) s(i, j) = sqrt_pi[i] * model.kernel(i, j) / sqrt_pi[j];
  s = 0.5 * (s + s.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) throw std::runtime_error("slem: eigensolver failed");
  Eigen::VectorXd ev = solver.eigenvalues();  // ascending
  report.eigenvalues.assign(ev.data(), ev.data() + r);
  std::reverse(report.eigenvalues.begin(), report.eigenvalues.end());

  report.lambda_min = report.eigenvalues.back();
  report.lambda2 = r > 1 ? report.eigenvalues[1] : report.eigenvalues[0];
  report.slem = std::max(report.lambda2, std::abs(report.lambda_min));
  report.spectral_gap = 1.0 - report.slem;
  report.mixing_time = report.spectral_gap > 0 ? 1.0 / report.spectral_gap : kInf;

  report.bound_single = mixing_bound_single(model.num_links, model.wtilde_max);
  report.bound_multi = mixing_bound_multi(model.num_links, model.wtilde_max);
  // compare in gap space so a huge bound never degenerates to 1.0 - 1.0
  const double gap_floor = model.kind == ChainKind::kSingleSite
                               ? std::exp(-report.bound_single.log_value)
                               : std::exp(-report.bound_multi.log_value);
  report.bound_holds = report.spectral_gap + 1e-12 >= gap_floor;
  return report;
}

ConductanceResult conductance(const ChainModel& model, int max_states) {
  const int r = static_cast<int>(model.states.size());
  if (max_states > 30) throw std::invalid_argument("conductance: cap above 30 not supported");
  if (r > max_states) throw std::invalid_argument("conductance: state space exceeds cap");
  if (r < 2) throw std::invalid_argument("conductance: need at least two states");

  // symmetric edge flows w(i,j) = pi_i P(i,j)
  Eigen::MatrixXd w(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) w(i, j) = model.stationary[i] * model.kernel(i, j);
  std::vector<double> rowsum(r, 0.0);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j)
      if (j != i) rowsum[i] += w(i, j);
  }

  // Gray-code walk over subsets; maintain F(B), pi(B) and the per-state
  // coupling S[v] = sum_{i in B} w(v,i) incrementally.
  std::vector<double> s(r, 0.0);
  std::vector<bool> in_b(r, false);
  double f = 0.0, pi_b = 0.0;
  std::uint32_t mask = 0;
  double best = kInf;
  std::uint32_t best_mask = 0;
  const std::uint64_t total = 1ULL << r;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int v = std::countr_zero(k);
    if (!in_b[v]) {
      f += rowsum[v] - 2.0 * s[v];
      for (int u = 0; u < r; ++u) s[u] += w(u, v);
      in_b[v] = true;
      pi_b += model.stationary[v];
      mask |= (1u << v);
    } else {
      for (int u = 0; u < r; ++u) s[u] -= w(u, v);
      in_b[v] = false;
      pi_b -= model.stationary[v];
      mask &= ~(1u << v);
      f += 2.0 * s[v] - rowsum[v];
    }
    if (mask != 0 && pi_b <= 0.5 + 1e-12) {
      const double ratio = f / pi_b;
      if (ratio < best) {
        best = ratio;
        best_mask = mask;
      }
    }
  }

  // recompute the winning cut exactly (the walk accumulates roundoff)
  ConductanceResult result;
  double f_exact = 0.0, pi_exact = 0.0;
  for (int i = 0; i < r; ++i) {
    if (!((best_mask >> i) & 1u)) continue;
    pi_exact += model.stationary[i];
    result.min_cut_states.push_back(i);
    for (int j = 0; j < r; ++j)
      if (!((best_mask >> j) & 1u)) f_exact += w(i, j);
  }
  result.phi = f_exact / pi_exact;
  return result;
}

double gershgorin_floor(const ChainModel& model) {
  const int r = static_cast<int>(model.states.size());
  double min_diag = kInf;
  for (int i = 0; i < r; ++i) min_diag = std::min(min_diag, model.kernel(i, i));
  return -1.0 + 2.0 * min_diag;
}

double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: size mismatch");
  if (std::abs(p.sum() - 1.0) > 1e-9 || std::abs(q.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("tv_distance: inputs must be probability vectors");
  return 0.5 * (p - q).cwiseAbs().sum();
}

double pi_norm_inv(const Eigen::VectorXd& z, const Eigen::VectorXd& pi) {
  if (z.size() != pi.size()) throw std::invalid_argument("pi_norm_inv: size mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!(pi[i] > 0)) throw std::invalid_argument("pi_norm_inv: pi must be positive");
    sum += z[i] * z[i] / pi[i];
  }
  return std::sqrt(sum);
}

double alpha_t(const WeightConfig& config, std::int64_t q_max_next) {
  const double floor = w_min(config, q_max_next);
  const double q_star = f_inverse(config.spec, floor);
  if (!(q_star >= 1.0))
    throw std::domain_error("alpha_t: f_inverse(w_min) < 1, q_max too small for the -1 shift");
  return 2.0 * config.num_links * f_prime(config.spec, q_star - 1.0);
}

AdiabaticReport adiabatic_condition(const WeightConfig& config, std::int64_t q_max, double delta,
                                    ChainKind kind) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("adiabatic_condition: delta must lie in (0,1)");
  if (q_max < 0) throw std::invalid_argument("adiabatic_condition: q_max must be >= 0");
  AdiabaticReport rep;
  rep.delta = delta;

  const double wmax = f_value(config.spec, static_cast<double>(q_max));
  const double floor = w_min(config, q_max);
  const double l_star = log1p_f_inverse(config.spec, floor);

  double log_fprime;
  if (l_star < 28.0) {
    // inverse is comfortably representable: evaluate the shift exactly
    double shifted = std::expm1(l_star) - 1.0;
    if (shifted < 0) {
      shifted = 0.0;
      rep.shift_clamped = true;
    }
    const double fp = f_prime(config.spec, shifted);
    log_fprime = std::log(fp);
  } else {
    // astronomically large inverse: the -1 shift is far below any tolerance
    log_fprime = log_f_prime_at_log1p(config.spec, l_star);
  }

  rep.log_alpha = std::log(2.0 * config.num_links) + log_fprime;
  rep.alpha = rep.log_alpha < 700 ? std::exp(rep.log_alpha) : kInf;

  const MixingBound bound = kind == ChainKind::kSingleSite
                                ? mixing_bound_single(config.num_links, wmax)
                                : mixing_bound_multi(config.num_links, wmax);
  rep.log_mixing_bound = bound.log_value;
  rep.log_condition_lhs = rep.log_alpha + rep.log_mixing_bound;
  rep.condition_lhs = rep.log_condition_lhs < 700 ? std::exp(rep.log_condition_lhs) : kInf;
  rep.satisfied = rep.log_condition_lhs <= std::log(delta / 16.0);
  return rep;
}

double q_threshold(int num_links, double epsilon, double delta, const WeightFunctionSpec& spec) {
  check_threshold_args(num_links, epsilon, delta);
  if (!spec.concave_family())
    throw std::invalid_argument("q_threshold: supported for the concave family only");
  const double n = num_links;
  const double scale = 2.0 * n / epsilon;
  // log(64 N 16^N / delta)
  const double a1 = std::log(64.0) + std::log(n) + n * std::log(16.0) - std::log(delta);

  if (spec.kind == WeightKind::kLogPower) {
    const double theta = spec.theta;
    const double a2 = std::exp(std::log(scale) + (1.0 / theta) * std::log(16.0 * n * n / epsilon));
    const double e_term = std::max(scale * a1, a2);
    const double log_q = std::pow(e_term, 1.0 / (1.0 - theta));
    if (std::isinf(log_q)) return kInf;
    // log(1 + q_th) from log(q_th)
    return log_q > 40 ? log_q : std::log1p(std::exp(log_q));
  }

  // general form via f(g^{-1}(z)) with z = 16 N^2 / eps
  const double z = 16.0 * n * n / epsilon;
  double fg;  // f(g^{-1}(z)) = (e^z - e) / z
  if (z < 700)
    fg = (std::exp(z) - std::numbers::e) / z;
  else
    fg = kInf;
  const double y = scale * std::max(a1, fg);
  if (std::isinf(y)) return kInf;
  return log1p_f_inverse(spec, y);
}

double t_star(int num_links, double epsilon, double delta, double theta, double log1p_q_th) {
  check_threshold_args(num_links, epsilon, delta);
  if (!(theta >= 0 && theta < 1)) throw std::invalid_argument("t_star: theta must lie in [0,1)");
  if (!(log1p_q_th >= 0)) throw std::invalid_argument("t_star: log1p_q_th must be >= 0");
  if (std::isinf(log1p_q_th)) return kInf;
  const double n = num_links;
  const double a = epsilon / (2.0 * n);
  const double l2 = logaddexp(0.0, log1p_q_th);  // log(2 + q_th)
  const double inner = std::log(4.0 / delta) + 0.5 * n * (std::log(2.0) + log1p_q_th);
  return (a * l2 + n * std::log(16.0) + std::log(inner)) / (1.0 - a);
}

double b_threshold(int num_links, double epsilon, double delta, const WeightFunctionSpec& spec,
                   double log1p_q_th, double log_t_star) {
  check_threshold_args(num_links, epsilon, delta);
  if (!spec.concave_family())
    throw std::invalid_argument("b_threshold: supported for the concave family only");
  const double branch1 = logaddexp(log1p_q_th, log_t_star);  // log(1 + q_th + t*)
  const double y2 = (num_links * std::log(2.0) + std::log(2.0 / delta)) / (epsilon / 2.0);
  const double branch2 = log1p_f_inverse(spec, y2);
  return std::max(branch1, branch2);
}

std::vector<PropagationStep> propagate_distribution(
    const ConflictGraph& graph, const std::vector<std::vector<double>>& weight_trace,
    const Eigen::VectorXd& mu0, int cap) {
  if (weight_trace.empty()) throw std::invalid_argument("propagate_distribution: empty weight trace");
  const auto states = graph.enumerate_independent_sets(cap);
  const int r = static_cast<int>(states.size());
  if (mu0.size() != r) throw std::invalid_argument("propagate_distribution: mu0 size mismatch");
  if (std::abs(mu0.sum() - 1.0) > 1e-9 || mu0.minCoeff() < -1e-15)
    throw std::invalid_argument("propagate_distribution: mu0 must be a probability vector");

  std::vector<PropagationStep> steps;
  steps.reserve(weight_trace.size());
  Eigen::VectorXd mu = mu0;
  for (std::size_t k = 0; k < weight_trace.size(); ++k) {
    ChainModel model = transition_matrix_single(graph, weight_trace[k], cap);
    const SpectralReport spec_report = slem(model);
    Eigen::VectorXd mu_next = model.kernel.transpose() * mu;

    if (!steps.empty()) {
      PropagationStep& prev = steps.back();
      prev.a_next = pi_norm_inv(mu_next - prev.pi, prev.pi);
    }

    PropagationStep step;
    step.mu = mu_next;
    step.pi = model.stationary;
    step.tv = tv_distance(mu_next, model.stationary);
    step.norm_dist = pi_norm_inv(mu_next - model.stationary, model.stationary);
    step.a_next = kNaN;  // filled by the next iteration
    step.sigma = spec_report.slem;
    step.mixing_time = spec_report.mixing_time;
    steps.push_back(std::move(step));
    mu = std::move(mu_next);
  }
  return steps;
}

std::optional<std::int64_t> adiabatic_warmup_slot(const std::vector<double>& mixing_times,
                                                  double delta, int num_links, double wmax0) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("adiabatic_warmup_slot: delta must lie in (0,1)");
  const double target = std::log(4.0 / delta) + num_links * (wmax0 + std::log(2.0)) / 2.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < mixing_times.size(); ++k) {
    if (!(mixing_times[k] >= 1)) throw std::invalid_argument("adiabatic_warmup_slot: mixing times must be >= 1");
    acc += 1.0 / (mixing_times[k] * mixing_times[k]);
    if (acc >= target) return static_cast<std::int64_t>(k);
  }
  return std::nullopt;
}

}  // namespace csma
