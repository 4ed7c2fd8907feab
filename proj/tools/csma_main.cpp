#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "csma/chain_analysis.hpp"
#include "csma/io.hpp"
#include "csma/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace csma;

namespace {

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// linear value only when representable; callers pair it with the log form
json linear_or_null(double log_value) {
  if (log_value < 700.0) return std::exp(log_value);
  return nullptr;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  unsigned workers = 0;
  std::uint64_t seed_base = 0;
};

int worker_count(unsigned flag_value) {
  unsigned workers = flag_value;
  if (const char* env = std::getenv("CSMA_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
      throw ConfigError(std::string("CSMA_WORKERS must be a positive integer, got '") + env + "'");
    workers = static_cast<unsigned>(v);
  }
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<int>(workers);
}

int cmd_simulate(const SimulateArgs& args) {
  const ExperimentPlan plan = load_plan(args.config);
  const ConflictGraph graph = plan.graph.build();
  const int n = graph.num_links();

  struct Task {
    std::size_t kind;
    double rho;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t k = 0; k < plan.kinds.size(); ++k)
    for (double rho : plan.rhos)
      for (std::uint64_t seed : plan.seeds) tasks.push_back({k, rho, seed});

  std::vector<json> entries(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex print_mutex;

  auto run_task = [&](std::size_t i) {
    const Task& task = tasks[i];
    const WeightFunctionSpec& spec = plan.kinds[task.kind];
    WeightConfig wc{spec, plan.epsilon, n, plan.use_wmin};
    RunOptions opts;
    opts.horizon = plan.horizon;
    opts.seed = args.seed_base + task.seed;
    opts.record_every = plan.record_every;
    opts.frozen = plan.frozen;
    opts.oracle_every = plan.oracle_every;
    opts.chi_epsilon = plan.epsilon;
    const ArrivalConfig arrivals = plan_arrivals(plan, graph, task.rho);

    RunResult result = plan.mode == "basic"
                           ? run_basic(graph, wc, arrivals, opts)
                           : run_distributed(graph, wc, arrivals, plan.mac, opts);

    const std::string rel = weight_kind_name(spec) + "/" + format_g(task.rho) + "/" +
                            std::to_string(task.seed);
    const fs::path dir = fs::path(args.out) / rel;
    fs::create_directories(dir);
    write_trace_csv((dir / "trace.csv").string(), result, n);

    json entry = run_summary_json(result);
    entry["kind"] = weight_kind_name(spec);
    entry["rho"] = task.rho;
    entry["seed"] = task.seed;
    entry["trace"] = rel + "/trace.csv";
    entries[i] = std::move(entry);

    std::lock_guard<std::mutex> lock(print_mutex);
    std::printf("done kind=%s rho=%s seed=%llu time_avg_queue=%.3f max_link_queue=%lld\n",
                weight_kind_name(spec).c_str(), format_g(task.rho).c_str(),
                static_cast<unsigned long long>(task.seed), result.time_avg_queue,
                static_cast<long long>(result.max_link_queue));
    std::fflush(stdout);
  };

  const int workers = std::min<int>(worker_count(args.workers), static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        try {
          run_task(i);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i].empty()) {
      std::fprintf(stderr, "run failed (kind=%s rho=%s seed=%llu): %s\n",
                   weight_kind_name(plan.kinds[tasks[i].kind]).c_str(),
                   format_g(tasks[i].rho).c_str(),
                   static_cast<unsigned long long>(tasks[i].seed), errors[i].c_str());
      return 1;
    }
  }

  json summary;
  summary["graph"] = plan.graph.name();
  summary["mode"] = plan.mode;
  summary["horizon"] = plan.horizon;
  summary["epsilon"] = plan.epsilon;
  summary["use_wmin"] = plan.use_wmin;
  summary["seed_base"] = args.seed_base;
  summary["runs"] = json::array();
  for (json& e : entries) summary["runs"].push_back(std::move(e));
  fs::create_directories(args.out);
  const std::string summary_path = (fs::path(args.out) / "summary.json").string();
  write_json(summary_path, summary);
  std::printf("summary: %s\n", summary_path.c_str());
  return 0;
}

struct AnalyzeArgs {
  std::string graph_path;
  std::vector<double> wtilde;
  std::string mode = "single";
  std::string mac = "bernoulli_half";
  int window = 4;
  int cap = ConflictGraph::kDefaultEnumerationCap;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const GraphSpec gspec = load_graph(args.graph_path);
  const ConflictGraph graph = gspec.build();
  const int n = graph.num_links();
  if (n > args.cap) {
    std::fprintf(stderr,
                 "analyze: %d links exceeds the exact-enumeration cap (%d); "
                 "use the simulate subcommand for instances this large\n",
                 n, args.cap);
    return 2;
  }
  std::vector<double> wtilde = args.wtilde;
  if (wtilde.empty()) wtilde.assign(n, 0.0);
  if (static_cast<int>(wtilde.size()) != n)
    throw ConfigError("analyze: --wtilde needs exactly " + std::to_string(n) + " values");

  ChainModel model;
  if (args.mode == "single") {
    model = transition_matrix_single(graph, wtilde, args.cap);
  } else if (args.mode == "multi") {
    MacConfig mac;
    mac.mechanism = args.mac == "windowed" ? MacMechanism::kWindowed
                                           : MacMechanism::kBernoulliHalf;
    mac.window = args.window;
    model = transition_matrix_multi(graph, wtilde, enumerate_decision_distribution(graph, mac),
                                    args.cap);
  } else {
    throw ConfigError("analyze: --mode must be 'single' or 'multi'");
  }

  const SpectralReport report = slem(model);
  const int r = static_cast<int>(model.states.size());

  json out;
  out["graph"] = gspec.name();
  out["num_links"] = n;
  out["num_states"] = r;
  out["mode"] = args.mode;
  out["wtilde"] = wtilde;
  out["wtilde_max"] = model.wtilde_max;
  out["eigenvalues"] = report.eigenvalues;
  out["sigma"] = report.slem;
  out["lambda2"] = report.lambda2;
  out["lambda_min"] = report.lambda_min;
  out["spectral_gap"] = report.spectral_gap;
  out["mixing_time"] = report.mixing_time;
  out["detailed_balance_residual"] = report.detailed_balance_residual;
  out["bound_single"] = {{"log", report.bound_single.log_value},
                         {"value", linear_or_null(report.bound_single.log_value)}};
  out["bound_multi"] = {{"log", report.bound_multi.log_value},
                        {"value", linear_or_null(report.bound_multi.log_value)}};

  json checks;
  checks["mixing_bound_holds"] = report.bound_holds;
  checks["lambda_min_above_gershgorin"] =
      report.lambda_min >= gershgorin_floor(model) - 1e-12;
  checks["sigma_is_lambda2"] = std::abs(report.lambda_min) <= report.lambda2 + 1e-12;
  const double wmax = model.wtilde_max;
  checks["stationary_floor_holds"] =
      model.stationary.minCoeff() >= (1.0 - 1e-9) / (r * std::exp(n * wmax));

  if (r <= 22) {
    const ConductanceResult cond = conductance(model);
    out["conductance"] = {{"phi", cond.phi},
                          {"min_cut_states", cond.min_cut_states}};
    checks["cheeger_lower"] = 1.0 - 2.0 * cond.phi <= report.lambda2 + 1e-12;
    checks["cheeger_upper"] = report.lambda2 <= 1.0 - 0.5 * cond.phi * cond.phi + 1e-12;
  } else {
    out["conductance"] = nullptr;
    out["conductance_skipped"] = "state space above the exhaustive cap (22)";
  }
  out["checks"] = std::move(checks);

  if (args.out.empty())
    std::cout << out.dump(2) << '\n';
  else
    write_json(args.out, out);
  return 0;
}

struct VerifyArgs {
  std::string suite;
  std::string out;
  std::uint64_t seed = VerifyOptions{}.seed;
};

int cmd_verify(const VerifyArgs& args) {
  VerifyOptions options;
  options.seed = args.seed;
  std::vector<SuiteResult> results;
  for (const SuiteEntry& entry : suite_registry()) {
    if (!args.suite.empty() && entry.name.find(args.suite) == std::string::npos) continue;
    results.push_back(entry.run(options));
  }
  if (results.empty()) throw ConfigError("verify: no suite matches '" + args.suite + "'");

  bool all_passed = true;
  json out = json::array();
  for (const SuiteResult& r : results) {
    all_passed = all_passed && r.passed;
    std::printf("%-28s %6lld checks %4lld failures  %s\n", r.name.c_str(),
                static_cast<long long>(r.checks), static_cast<long long>(r.failures),
                r.passed ? "PASS" : "FAIL");
    std::printf("%-28s   %s\n", "", r.detail.c_str());
    out.push_back({{"name", r.name},
                   {"passed", r.passed},
                   {"checks", r.checks},
                   {"failures", r.failures},
                   {"worst", r.worst},
                   {"detail", r.detail}});
  }
  if (!args.out.empty()) write_json(args.out, out);
  std::printf("%s\n", all_passed ? "all suites passed" : "verification FAILED");
  return all_passed ? 0 : 1;
}

struct ThresholdArgs {
  int num_links = 0;
  double epsilon = 0.2;
  double delta = 0.1;
  std::string kind = "log_power";
  double theta = 0.5;
  std::string out;
};

int cmd_thresholds(const ThresholdArgs& args) {
  const WeightFunctionSpec spec = parse_weight_kind(args.kind, args.theta);
  const double n = args.num_links;

  const double log1p_q = q_threshold(args.num_links, args.epsilon, args.delta, spec);
  const double theta_for_t = spec.kind == WeightKind::kLogPower ? spec.theta : 0.5;
  const double log_t = t_star(args.num_links, args.epsilon, args.delta, theta_for_t, log1p_q);
  const double log1p_b =
      b_threshold(args.num_links, args.epsilon, args.delta, spec, log1p_q, log_t);

  json out;
  out["num_links"] = args.num_links;
  out["epsilon"] = args.epsilon;
  out["delta"] = args.delta;
  out["kind"] = weight_kind_name(spec);
  out["log1p_q_th"] = log1p_q;
  out["log_t_star"] = log_t;
  out["log1p_B"] = log1p_b;
  out["q_th"] = linear_or_null(log1p_q);
  out["t_star"] = linear_or_null(log_t);
  out["B"] = linear_or_null(log1p_b);

  json terms;
  terms["log_floor_term"] =
      std::log(64.0) + std::log(n) + n * std::log(16.0) - std::log(args.delta);
  terms["scale_2N_over_eps"] = 2.0 * n / args.epsilon;
  terms["B_weight_branch_arg"] =
      (n * std::log(2.0) + std::log(2.0 / args.delta)) / (args.epsilon / 2.0);
  terms["t_exponent"] = 1.0 / (1.0 - args.epsilon / (2.0 * n));
  out["terms"] = std::move(terms);

  if (args.out.empty())
    std::cout << out.dump(2) << '\n';
  else
    write_json(args.out, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"queue-driven CSMA scheduling: simulator, exact chain analysis, thresholds"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "run an experiment sweep from a JSON plan");
  sim->add_option("--config", sim_args.config, "experiment plan (JSON)")->required();
  sim->add_option("--out", sim_args.out, "output directory")->required();
  sim->add_option("--workers", sim_args.workers, "parallel runs (default: hardware)");
  sim->add_option("--seed-base", sim_args.seed_base, "offset added to every seed");

  AnalyzeArgs an_args;
  CLI::App* an = app.add_subcommand("analyze", "exact spectral/conductance report");
  an->add_option("--graph", an_args.graph_path, "graph description (JSON)")->required();
  an->add_option("--wtilde", an_args.wtilde, "per-link weights (default all 0)")
      ->delimiter(',');
  an->add_option("--mode", an_args.mode, "single | multi (default single)");
  an->add_option("--mac", an_args.mac, "multi decisions: bernoulli_half | windowed");
  an->add_option("--window", an_args.window, "window for windowed decisions (default 4)");
  an->add_option("--cap", an_args.cap, "enumeration cap (default 20)");
  an->add_option("--out", an_args.out, "write JSON here instead of stdout");

  VerifyArgs ver_args;
  CLI::App* ver = app.add_subcommand("verify", "run the property suites");
  ver->add_option("--suite", ver_args.suite, "only suites whose name contains this");
  ver->add_option("--out", ver_args.out, "write JSON results here");
  ver->add_option("--seed", ver_args.seed, "corpus seed");

  ThresholdArgs th_args;
  CLI::App* th = app.add_subcommand("thresholds", "adaptive-schedule threshold formulas");
  th->add_option("--N", th_args.num_links, "number of links")->required();
  th->add_option("--epsilon", th_args.epsilon, "throughput slack in (0,1)");
  th->add_option("--delta", th_args.delta, "TV tolerance in (0,1)");
  th->add_option("--kind", th_args.kind, "log_over_loglog | log_power");
  th->add_option("--theta", th_args.theta, "log_power exponent parameter");
  th->add_option("--out", th_args.out, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (an->parsed()) return cmd_analyze(an_args);
    if (ver->parsed()) return cmd_verify(ver_args);
    if (th->parsed()) return cmd_thresholds(th_args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
