#include "csma/glauber.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csma {

namespace {

constexpr int kMaxKernelStates = 2048;

void check_wtilde(const ConflictGraph& graph, const std::vector<double>& wtilde) {
  if (static_cast<int>(wtilde.size()) != graph.num_links())
    throw std::invalid_argument("wtilde size must match the number of links");
  for (double w : wtilde)
    if (!std::isfinite(w) || w < 0)
      throw std::invalid_argument("wtilde entries must be finite and >= 0");
}

double state_log_weight(const Schedule& s, const std::vector<double>& wtilde) {
  double sum = 0.0;
  for (int l : s.indices()) sum += wtilde[l];
  return sum;
}

}  // namespace

double activation_probability(double wtilde) {
  if (!(wtilde >= 0)) throw std::invalid_argument("activation_probability: weight must be >= 0");
  // exp(w)/(1+exp(w)) without overflow
  return 1.0 / (1.0 + std::exp(-wtilde));
}

ChainState single_site_step(const ConflictGraph& graph, const ChainState& state,
                            const std::vector<double>& wtilde, SeededRng& rng) {
  check_wtilde(graph, wtilde);
  const int link = rng.uniform_int(graph.num_links());
  const double draw = rng.uniform01();  // always consumed; see header
  ChainState next = state;
  next.slot = state.slot + 1;
  if (graph.neighbor_mask(link).intersects(state.schedule)) {
    next.schedule.set(link, false);
  } else {
    next.schedule.set(link, draw < activation_probability(wtilde[link]));
  }
  return next;
}

ChainState multi_site_step(const ConflictGraph& graph, const ChainState& state,
                           const std::vector<double>& wtilde, const Schedule& decision,
                           SeededRng& rng) {
  check_wtilde(graph, wtilde);
  if (!graph.is_independent(decision))
    throw std::invalid_argument("multi_site_step: decision schedule must be independent");
  ChainState next = state;
  next.slot = state.slot + 1;
  for (int link : decision.indices()) {
    const double draw = rng.uniform01();
    if (graph.neighbor_mask(link).intersects(state.schedule)) {
      next.schedule.set(link, false);
    } else {
      next.schedule.set(link, draw < activation_probability(wtilde[link]));
    }
  }
  return next;
}

int ChainModel::index_of(const Schedule& s) const {
  auto it = std::lower_bound(states.begin(), states.end(), s);
  if (it == states.end() || !(*it == s)) throw std::invalid_argument("index_of: unknown state");
  return static_cast<int>(it - states.begin());
}

void ChainModel::validate(double tol) const {
  const int r = static_cast<int>(states.size());
  if (kernel.rows() != r || kernel.cols() != r || stationary.size() != r)
    throw std::runtime_error("ChainModel: inconsistent dimensions");
  for (int i = 0; i < r; ++i) {
    if (std::abs(kernel.row(i).sum() - 1.0) > tol)
      throw std::runtime_error("ChainModel: kernel row does not sum to 1");
    if (!(stationary[i] > 0)) throw std::runtime_error("ChainModel: stationary entry not positive");
  }
  if (std::abs(stationary.sum() - 1.0) > tol)
    throw std::runtime_error("ChainModel: stationary does not sum to 1");
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const double lhs = stationary[i] * kernel(i, j);
      const double rhs = stationary[j] * kernel(j, i);
      if (std::abs(lhs - rhs) > tol) throw std::runtime_error("ChainModel: detailed balance violated");
    }
}

Eigen::VectorXd stationary_distribution(const ConflictGraph& graph,
                                        const std::vector<double>& wtilde, int cap) {
  check_wtilde(graph, wtilde);
  const auto states = graph.enumerate_independent_sets(cap);
  const int r = static_cast<int>(states.size());
  Eigen::VectorXd logw(r);
  for (int i = 0; i < r; ++i) logw[i] = state_log_weight(states[i], wtilde);
  const double m = logw.maxCoeff();
  double z = 0.0;
  for (int i = 0; i < r; ++i) z += std::exp(logw[i] - m);
  const double log_z = m + std::log(z);
  Eigen::VectorXd pi(r);
  for (int i = 0; i < r; ++i) pi[i] = std::exp(logw[i] - log_z);
  return pi;
}

ChainModel transition_matrix_single(const ConflictGraph& graph, const std::vector<double>& wtilde,
                                    int cap) {
  check_wtilde(graph, wtilde);
  ChainModel model;
  model.kind = ChainKind::kSingleSite;
  model.num_links = graph.num_links();
  model.wtilde_max = *std::max_element(wtilde.begin(), wtilde.end());
  model.states = graph.enumerate_independent_sets(cap);
  const int r = static_cast<int>(model.states.size());
  if (r > kMaxKernelStates) throw std::runtime_error("transition_matrix_single: state space too large");

  const int n = graph.num_links();
  const double inv_n = 1.0 / n;
  model.kernel = Eigen::MatrixXd::Zero(r, r);
  for (int s = 0; s < r; ++s) {
    const Schedule& x = model.states[s];
    for (int link = 0; link < n; ++link) {
      if (graph.neighbor_mask(link).intersects(x)) {
        // occupied neighborhood: the link is forced off, schedule unchanged
        model.kernel(s, s) += inv_n;
        continue;
      }
      const double p = activation_probability(wtilde[link]);
      Schedule on = x;
      on.set(link, true);
      Schedule off = x;
      off.set(link, false);
      model.kernel(s, model.index_of(on)) += inv_n * p;
      model.kernel(s, model.index_of(off)) += inv_n * (1.0 - p);
    }
  }
  model.stationary = stationary_distribution(graph, wtilde, cap);
  return model;
}

ChainModel transition_matrix_multi(const ConflictGraph& graph, const std::vector<double>& wtilde,
                                   const DecisionDistribution& decisions, int cap) {
  check_wtilde(graph, wtilde);
  if (decisions.empty()) throw std::invalid_argument("transition_matrix_multi: empty decision distribution");
  double total = 0.0;
  for (const auto& [m, alpha] : decisions) {
    if (!(alpha >= 0)) throw std::invalid_argument("transition_matrix_multi: negative probability");
    if (!graph.is_independent(m))
      throw std::invalid_argument("transition_matrix_multi: decision support must be independent sets");
    total += alpha;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("transition_matrix_multi: probabilities must sum to 1");

  ChainModel model;
  model.kind = ChainKind::kMultiSite;
  model.num_links = graph.num_links();
  model.wtilde_max = *std::max_element(wtilde.begin(), wtilde.end());
  model.states = graph.enumerate_independent_sets(cap);
  const int r = static_cast<int>(model.states.size());
  if (r > kMaxKernelStates) throw std::runtime_error("transition_matrix_multi: state space too large");

  const int n = graph.num_links();
  std::vector<double> p(n), q(n);
  for (int l = 0; l < n; ++l) {
    p[l] = activation_probability(wtilde[l]);
    q[l] = 1.0 - p[l];
  }

  model.kernel = Eigen::MatrixXd::Zero(r, r);
  for (int si = 0; si < r; ++si) {
    const Schedule& x = model.states[si];
    for (int sj = 0; sj < r; ++sj) {
      const Schedule& y = model.states[sj];
      const Schedule diff = x.sym_diff(y);
      // neighborhood of x ∪ y
      Schedule blocked(n);
      for (int l : x.set_union(y).indices()) blocked = blocked.set_union(graph.neighbor_mask(l));
      double prob = 0.0;
      for (const auto& [m, alpha] : decisions) {
        if (alpha == 0.0) continue;
        if (!m.contains(diff)) continue;
        double term = alpha;
        for (int l : m.indices()) {
          if (y.test(l))
            term *= p[l];  // resampled active
          else if (!blocked.test(l))
            term *= q[l];  // free but came up inactive
          // else: silenced by an active neighborhood, factor 1
        }
        prob += term;
      }
      model.kernel(si, sj) = prob;
    }
  }
  model.stationary = stationary_distribution(graph, wtilde, cap);
  return model;
}

}  // namespace csma
