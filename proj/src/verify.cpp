#include "csma/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "csma/chain_analysis.hpp"
#include "csma/distributed_mac.hpp"
#include "csma/glauber.hpp"
#include "csma/network_sim.hpp"
#include "csma/weights.hpp"

namespace csma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// deterministic weight patterns for a graph, plus one random draw
std::vector<std::vector<double>> weight_patterns(int n, SeededRng& rng) {
  std::vector<std::vector<double>> out;
  out.emplace_back(n, 0.0);
  out.emplace_back(n, 1.0);
  std::vector<double> ramp(n);
  for (int l = 0; l < n; ++l) ramp[l] = 0.25 * (l % 5);
  out.push_back(std::move(ramp));
  std::vector<double> rnd(n);
  for (int l = 0; l < n; ++l) rnd[l] = 2.0 * rng.uniform01();
  out.push_back(std::move(rnd));
  return out;
}

std::vector<ConflictGraph> stationary_corpus(SeededRng& rng) {
  std::vector<ConflictGraph> graphs;
  for (int n = 2; n <= 8; ++n) graphs.push_back(path_graph(n));
  for (int n = 3; n <= 9; ++n) graphs.push_back(cycle_graph(n));
  for (int leaves = 3; leaves <= 6; ++leaves) graphs.push_back(star_graph(leaves));
  for (double p : {0.35, 0.5, 0.65}) graphs.push_back(random_graph(10, p, rng));
  return graphs;
}

std::vector<ConflictGraph> small_corpus(SeededRng& rng) {
  std::vector<ConflictGraph> graphs;
  graphs.push_back(path_graph(2));
  graphs.push_back(path_graph(3));
  graphs.push_back(path_graph(4));
  graphs.push_back(cycle_graph(4));
  graphs.push_back(star_graph(3));
  graphs.push_back(complete_graph(4));
  graphs.push_back(random_graph(4, 0.5, rng));
  return graphs;
}

double empirical_tv(const std::vector<Schedule>& states, const std::map<Schedule, std::int64_t>& counts,
                    const Eigen::VectorXd& pi, std::int64_t total) {
  double tv = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto it = counts.find(states[i]);
    const double freq =
        it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
    tv += std::abs(freq - pi[static_cast<int>(i)]);
  }
  return 0.5 * tv;
}

// frozen run needs integer queues; pick deterministic moderate values so
// weights stay small and the chain mixes well inside 1e6 slots
std::vector<std::int64_t> frozen_queues(int n, SeededRng& rng) {
  std::vector<std::int64_t> q(n);
  for (int l = 0; l < n; ++l) q[l] = rng.uniform_int(9);
  return q;
}

SuiteResult fixed_point_suite(const std::string& name, bool multi, const VerifyOptions& options) {
  SuiteResult result;
  result.name = name;
  SeededRng rng(options.seed);
  SeededRng graph_rng = rng.stream(7);
  SeededRng weight_rng = rng.stream(8);
  std::vector<ConflictGraph> graphs = stationary_corpus(graph_rng);
  if (multi) {
    // Bernoulli decision enumeration walks 2^N send patterns; keep N <= 8
    std::erase_if(graphs, [](const ConflictGraph& g) { return g.num_links() > 8; });
    SeededRng extra = rng.stream(9);
    graphs.push_back(random_graph(7, 0.5, extra));
    graphs.push_back(random_graph(8, 0.5, extra));
  }
  double worst = 0.0;
  for (const ConflictGraph& graph : graphs) {
    for (const auto& wtilde : weight_patterns(graph.num_links(), weight_rng)) {
      ChainModel model =
          multi ? transition_matrix_multi(
                      graph, wtilde,
                      enumerate_decision_distribution(graph, MacConfig{MacMechanism::kBernoulliHalf, 32, 1.0, 1.0}))
                : transition_matrix_single(graph, wtilde);
      ++result.checks;
      try {
        model.validate(1e-12);
      } catch (const std::exception&) {
        ++result.failures;
        continue;
      }
      const Eigen::VectorXd fp = left_fixed_point(model.kernel);
      const double diff = (fp - model.stationary).cwiseAbs().maxCoeff();
      worst = std::max(worst, diff);
      if (!(diff <= 1e-9)) ++result.failures;
    }
  }
  result.worst = worst;
  result.passed = result.failures == 0;
  result.detail = "max |fixed point - product form| = " + fmt(worst);
  return result;
}

SuiteResult frozen_sim_suite(const std::string& name, bool multi, const VerifyOptions& options) {
  SuiteResult result;
  result.name = name;
  SeededRng rng(options.seed);
  SeededRng graph_rng = rng.stream(11);
  SeededRng queue_rng = rng.stream(12);
  double worst = 0.0;
  int idx = 0;
  for (const ConflictGraph& graph : small_corpus(graph_rng)) {
    const int n = graph.num_links();
    WeightConfig config;
    config.spec = WeightFunctionSpec::log_over_loglog();
    config.num_links = n;

    RunOptions options_run;
    options_run.horizon = 1000000;
    options_run.seed = options.seed + 1000 + idx++;
    options_run.frozen = true;
    options_run.q0 = frozen_queues(n, queue_rng);
    options_run.count_schedules = true;

    RunResult run = multi ? run_distributed(graph, config, ArrivalConfig{},
                                            MacConfig{MacMechanism::kBernoulliHalf, 32, 1.0, 1.0},
                                            options_run)
                          : run_basic(graph, config, ArrivalConfig{}, options_run);

    const std::vector<double> wtilde = effective_weights(config, options_run.q0);
    const auto states = graph.enumerate_independent_sets();
    const Eigen::VectorXd pi = stationary_distribution(graph, wtilde);
    const double tv = empirical_tv(states, run.schedule_counts, pi, options_run.horizon);
    ++result.checks;
    worst = std::max(worst, tv);
    if (!(tv <= 0.01)) ++result.failures;
  }
  result.worst = worst;
  result.passed = result.failures == 0;
  result.detail = "max empirical TV = " + fmt(worst) + " over 1e6-slot frozen runs";
  return result;
}

SuiteResult mixing_bound_suite(const std::string& name, bool multi, const VerifyOptions& options) {
  SuiteResult result;
  result.name = name;
  SeededRng rng(options.seed);
  SeededRng graph_rng = rng.stream(21);
  SeededRng weight_rng = rng.stream(22);
  double worst = -kInf;  // worst margin: max of (gap floor - gap); negative is good
  for (int k = 0; k < 200; ++k) {
    const int n = 2 + static_cast<int>(graph_rng.uniform_int(5));
    const double p = 0.2 + 0.6 * graph_rng.uniform01();
    ConflictGraph graph = random_graph(n, p, graph_rng);
    std::vector<double> wtilde(n);
    for (int l = 0; l < n; ++l) wtilde[l] = 2.0 * weight_rng.uniform01();

    ChainModel model =
        multi ? transition_matrix_multi(
                    graph, wtilde,
                    enumerate_decision_distribution(graph, MacConfig{MacMechanism::kBernoulliHalf, 32, 1.0, 1.0}))
              : transition_matrix_single(graph, wtilde);
    const SpectralReport report = slem(model);
    ++result.checks;
    const double floor = multi ? std::exp(-report.bound_multi.log_value)
                               : std::exp(-report.bound_single.log_value);
    worst = std::max(worst, floor - report.spectral_gap);
    if (!report.bound_holds) ++result.failures;
  }
  result.worst = worst;
  result.passed = result.failures == 0;
  result.detail = "max (1/bound - gap) = " + fmt(worst) + " (must stay <= 0)";
  return result;
}

}  // namespace

ConflictGraph path_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return ConflictGraph(n, edges);
}

ConflictGraph cycle_graph(int n) {
  if (n < 3) throw std::invalid_argument("cycle_graph: need at least 3 links");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  edges.push_back({n - 1, 0});
  return ConflictGraph(n, edges);
}

ConflictGraph star_graph(int leaves) {
  if (leaves < 1) throw std::invalid_argument("star_graph: need at least 1 leaf");
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return ConflictGraph(leaves + 1, edges);
}

ConflictGraph complete_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  return ConflictGraph(n, edges);
}

ConflictGraph random_graph(int n, double edge_prob, SeededRng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform01() < edge_prob) edges.push_back({i, j});
  return ConflictGraph(n, edges);
}

Eigen::VectorXd left_fixed_point(const Eigen::MatrixXd& kernel) {
  const Eigen::Index r = kernel.rows();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(kernel.transpose());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("left_fixed_point: eigensolver failed");
  Eigen::Index best = 0;
  double best_dist = kInf;
  for (Eigen::Index i = 0; i < r; ++i) {
    const std::complex<double> ev = solver.eigenvalues()[i];
    const double dist = std::abs(ev - std::complex<double>(1.0, 0.0));
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  if (best_dist > 1e-8)
    throw std::runtime_error("left_fixed_point: no eigenvalue near 1 (kernel not stochastic?)");
  Eigen::VectorXd v = solver.eigenvectors().col(best).real();
  const double total = v.sum();
  if (std::abs(total) < 1e-12)
    throw std::runtime_error("left_fixed_point: degenerate eigenvector");
  v /= total;
  return v;
}

SuiteResult suite_weight_sandwich() {
  SuiteResult result;
  result.name = "weight_sandwich";
  const double m1 = 5.0, m2 = 5.0, eps = 0.1;
  const std::vector<WeightFunctionSpec> kinds = {
      WeightFunctionSpec::log_over_loglog(), WeightFunctionSpec::log_power(0.3),
      WeightFunctionSpec::log_power(0.5), WeightFunctionSpec::log_power(0.7)};

  std::ostringstream detail;
  double worst_q = 0.0;
  for (const auto& spec : kinds) {
    // geometric scan up to 1e9; the violations must form a prefix
    std::vector<double> qs;
    for (double q = m1 + 1.0; q <= 200.0; q += 1.0) qs.push_back(q);
    for (double q = 200.0; q <= 1e9; q *= 1.03) qs.push_back(q);
    double last_violation = 0.0;
    for (double q : qs) {
      const double f = f_value(spec, q);
      const bool ok = (1.0 - eps) * f <= f_value(spec, q - m1) &&
                      f_value(spec, q + m2) <= (1.0 + eps) * f;
      ++result.checks;
      if (!ok) last_violation = q;
    }
    // the sandwich must hold on a nonempty tail of the scan: violations
    // form a prefix by construction of last_violation, so it is enough
    // that the scan extends beyond it
    if (qs.back() <= last_violation) ++result.failures;
    worst_q = std::max(worst_q, last_violation);
    detail << weight_kind_name(spec) << ": Q=" << fmt(last_violation) << "  ";
  }
  result.worst = worst_q;
  result.passed = result.failures == 0;
  result.detail = detail.str();
  return result;
}

SuiteResult suite_weight_derivative_bound() {
  SuiteResult result;
  result.name = "weight_derivative_bound";
  const double e_minus_1 = std::exp(1.0) - 1.0;

  struct Case {
    WeightFunctionSpec spec;
    double q_lo;
  };
  const std::vector<Case> log_family = {
      {WeightFunctionSpec::log_over_loglog(), 0.0},
      {WeightFunctionSpec::log_power(0.3), e_minus_1},
      {WeightFunctionSpec::log_power(0.5), e_minus_1},
      {WeightFunctionSpec::log_power(0.7), e_minus_1},
  };
  double worst = -kInf;  // max of f'(q)*(1+q) - 1, must stay <= 0
  for (const Case& c : log_family) {
    for (double q = c.q_lo; q <= 1e12; q = q < 1.0 ? q + 0.05 : q * 1.1) {
      const double margin = f_prime(c.spec, q) * (1.0 + q) - 1.0;
      ++result.checks;
      worst = std::max(worst, margin);
      if (margin > 1e-9) ++result.failures;
    }
  }

  // the fast kinds must violate the bound somewhere: that is exactly why
  // they sit outside the adaptive-weight guarantees
  const bool linear_violates =
      f_prime(WeightFunctionSpec::linear(), 1.0) * 2.0 > 1.0 + 1e-12;
  const bool sqrt_violates =
      f_prime(WeightFunctionSpec::sqrt(), 4.0) * 5.0 > 1.0 + 1e-12;
  result.checks += 2;
  if (!linear_violates) ++result.failures;
  if (!sqrt_violates) ++result.failures;

  result.worst = worst;
  result.passed = result.failures == 0;
  result.detail = "log family max f'(q)(1+q)-1 = " + fmt(worst) +
                  "; linear/sqrt excluded (bound provably violated)";
  return result;
}

SuiteResult suite_stationary_single_exact(const VerifyOptions& options) {
  return fixed_point_suite("stationary_single_exact", false, options);
}

SuiteResult suite_stationary_single_sim(const VerifyOptions& options) {
  return frozen_sim_suite("stationary_single_sim", false, options);
}

SuiteResult suite_stationary_multi_exact(const VerifyOptions& options) {
  return fixed_point_suite("stationary_multi_exact", true, options);
}

SuiteResult suite_stationary_multi_sim(const VerifyOptions& options) {
  return frozen_sim_suite("stationary_multi_sim", true, options);
}

SuiteResult suite_mixing_bound_single(const VerifyOptions& options) {
  return mixing_bound_suite("mixing_bound_single", false, options);
}

SuiteResult suite_mixing_bound_multi(const VerifyOptions& options) {
  return mixing_bound_suite("mixing_bound_multi", true, options);
}

SuiteResult suite_conductance_bounds(const VerifyOptions& options) {
  SuiteResult result;
  result.name = "conductance_bounds";
  SeededRng rng(options.seed);
  SeededRng graph_rng = rng.stream(31);
  SeededRng weight_rng = rng.stream(32);

  std::vector<ConflictGraph> graphs;
  graphs.push_back(path_graph(2));
  graphs.push_back(path_graph(3));
  graphs.push_back(path_graph(4));
  graphs.push_back(path_graph(5));
  graphs.push_back(cycle_graph(4));
  graphs.push_back(cycle_graph(5));
  graphs.push_back(cycle_graph(6));
  graphs.push_back(star_graph(3));
  graphs.push_back(star_graph(4));
  graphs.push_back(complete_graph(4));
  graphs.push_back(complete_graph(5));
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + static_cast<int>(graph_rng.uniform_int(4));
    ConflictGraph g = random_graph(n, 0.3 + 0.6 * graph_rng.uniform01(), graph_rng);
    if (g.enumerate_independent_sets().size() <= 22) graphs.push_back(std::move(g));
  }

  double worst = -kInf;
  for (const ConflictGraph& graph : graphs) {
    if (graph.enumerate_independent_sets().size() > 22) continue;
    for (const auto& wtilde : weight_patterns(graph.num_links(), weight_rng)) {
      ChainModel model = transition_matrix_single(graph, wtilde);
      const SpectralReport report = slem(model);
      const ConductanceResult cond = conductance(model);
      ++result.checks;
      bool ok = cond.phi > 0;
      // Cheeger sandwich
      const double lower_violation = (1.0 - 2.0 * cond.phi) - report.lambda2;
      const double upper_violation = report.lambda2 - (1.0 - 0.5 * cond.phi * cond.phi);
      ok = ok && lower_violation <= 1e-12 && upper_violation <= 1e-12;
      worst = std::max({worst, lower_violation, upper_violation});
      // Gershgorin floor on the smallest eigenvalue
      ok = ok && report.lambda_min >= gershgorin_floor(model) - 1e-12;
      // the slow mode is lambda2, not a negative eigenvalue
      ok = ok && std::abs(report.lambda_min) <= report.lambda2 + 1e-12;
      // stationary floor over the r enumerated schedules
      const double wmax = *std::max_element(wtilde.begin(), wtilde.end());
      const double r = static_cast<double>(model.states.size());
      const double pi_floor = 1.0 / (r * std::exp(graph.num_links() * wmax));
      ok = ok && model.stationary.minCoeff() >= pi_floor * (1.0 - 1e-9);
      if (!ok) ++result.failures;
    }
  }
  result.worst = worst;
  result.passed = result.failures == 0;
  result.detail = "max Cheeger violation = " + fmt(worst) + " (must stay <= 0)";
  return result;
}

SuiteResult suite_drift_bound(const VerifyOptions& options) {
  SuiteResult result;
  result.name = "drift_bound";
  SeededRng rng(options.seed);
  SeededRng graph_rng = rng.stream(41);
  SeededRng weight_rng = rng.stream(42);
  double worst = -kInf;  // max of norm - 2 alpha, must stay <= 0
  for (int k = 0; k < 200; ++k) {
    const int n = 2 + static_cast<int>(graph_rng.uniform_int(5));
    ConflictGraph graph = random_graph(n, 0.2 + 0.6 * graph_rng.uniform01(), graph_rng);
    std::vector<double> w(n), w_next(n);
    for (int l = 0; l < n; ++l) w[l] = 2.0 * weight_rng.uniform01();
    const double alpha = 0.05 + 0.9 * weight_rng.uniform01();
    // per-link drift at most alpha/2N keeps the product-form ratio in e^{+-alpha}
    const double step = alpha / (2.0 * n);
    for (int l = 0; l < n; ++l)
      w_next[l] = std::max(0.0, w[l] + step * (2.0 * weight_rng.uniform01() - 1.0));
    const Eigen::VectorXd pi = stationary_distribution(graph, w);
    const Eigen::VectorXd pi_next = stationary_distribution(graph, w_next);
    const double norm = pi_norm_inv(pi_next - pi, pi_next);
    ++result.checks;
    worst = std::max(worst, norm - 2.0 * alpha);
    if (!(norm <= 2.0 * alpha + 1e-12)) ++result.failures;
  }
  result.worst = worst;
  result.passed = result.failures == 0;
  result.detail = "max ||pi'-pi||_{1/pi'} - 2 alpha = " + fmt(worst) + " (must stay <= 0)";
  return result;
}

namespace {
SuiteResult sandwich_entry(const VerifyOptions&) { return suite_weight_sandwich(); }
SuiteResult derivative_entry(const VerifyOptions&) { return suite_weight_derivative_bound(); }
}  // namespace

const std::vector<SuiteEntry>& suite_registry() {
  static const std::vector<SuiteEntry> entries = {
      {"weight_sandwich", sandwich_entry},
      {"weight_derivative_bound", derivative_entry},
      {"stationary_single_exact", suite_stationary_single_exact},
      {"stationary_single_sim", suite_stationary_single_sim},
      {"stationary_multi_exact", suite_stationary_multi_exact},
      {"stationary_multi_sim", suite_stationary_multi_sim},
      {"mixing_bound_single", suite_mixing_bound_single},
      {"mixing_bound_multi", suite_mixing_bound_multi},
      {"conductance_bounds", suite_conductance_bounds},
      {"drift_bound", suite_drift_bound},
  };
  return entries;
}

std::vector<SuiteResult> run_all_suites(const VerifyOptions& options) {
  std::vector<SuiteResult> out;
  for (const SuiteEntry& entry : suite_registry()) out.push_back(entry.run(options));
  return out;
}

}  // namespace csma
