#pragma once

#include <cstdint>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csma/conflict_graph.hpp"
#include "csma/distributed_mac.hpp"
#include "csma/network_sim.hpp"
#include "csma/weights.hpp"

namespace csma {

// Bad user-supplied configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A conflict graph described by config: a named builtin, a node/link list
// (one-hop interference), or explicit conflict edges.
struct GraphSpec {
  std::string builtin;                       // "grid4x4", or empty
  int nodes = 0;                             // node/link form
  std::vector<std::pair<int, int>> links;    // 0-based node pairs
  int num_links = 0;                         // explicit-conflict form
  std::vector<std::pair<int, int>> conflicts;

  std::string name() const;
  ConflictGraph build() const;
};

GraphSpec parse_graph(const nlohmann::json& j);
GraphSpec load_graph(const std::string& path);

// Full sweep description for the simulate subcommand.
struct ExperimentPlan {
  GraphSpec graph;
  std::vector<WeightFunctionSpec> kinds;
  double epsilon = 0.2;
  bool use_wmin = false;

  std::vector<double> rhos;                  // structured arrivals, one run per rho
  std::vector<std::pair<std::vector<int>, double>> components;  // 1-based link ids, c_i
  std::vector<double> lambda;                // direct per-link rates (then rhos unused)

  std::vector<std::uint64_t> seeds;
  std::int64_t horizon = 100000;
  std::int64_t record_every = 1000;
  std::int64_t oracle_every = 0;
  bool frozen = false;
  std::string mode = "distributed";          // "basic" | "distributed"
  MacConfig mac;
};

ExperimentPlan parse_plan(const nlohmann::json& j);
ExperimentPlan load_plan(const std::string& path);

// weight.kind string <-> spec ("log_over_loglog", "log_power" + theta,
// "loglog", "linear", "sqrt")
WeightFunctionSpec parse_weight_kind(const std::string& kind, double theta);

// Arrival config for one rho value of the plan.
ArrivalConfig plan_arrivals(const ExperimentPlan& plan, const ConflictGraph& graph, double rho);

// CSV with header: t,q1..qN,x_mask,achieved_w,wstar (wstar empty when the
// oracle was off that slot). x_mask is the schedule bitmask in hex.
void write_trace_csv(const std::string& path, const RunResult& result, int num_links);

// Per-run metrics block used by the simulate summary.
nlohmann::json run_summary_json(const RunResult& result);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace csma
