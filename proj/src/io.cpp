#include "csma/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace csma {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& message) {
  throw ConfigError(context + ": " + message);
}

const json& require(const json& j, const char* key, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) fail(context, std::string("missing key '") + key + "'");
  return *it;
}

std::vector<std::pair<int, int>> parse_pairs(const json& j, const std::string& context) {
  if (!j.is_array()) fail(context, "expected an array of [a,b] pairs");
  std::vector<std::pair<int, int>> out;
  for (const json& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      fail(context, "each entry must be a pair of integers");
    out.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  return out;
}

}  // namespace

std::string GraphSpec::name() const {
  if (!builtin.empty()) return builtin;
  if (!links.empty()) return "links" + std::to_string(links.size());
  return "conflicts" + std::to_string(num_links);
}

ConflictGraph GraphSpec::build() const {
  try {
    if (!builtin.empty()) {
      if (builtin == "grid4x4") return build_grid_4x4().graph;
      fail("graph.builtin", "unknown builtin '" + builtin + "'");
    }
    if (!links.empty()) return ConflictGraph::from_links(nodes, links);
    return ConflictGraph(num_links, conflicts);
  } catch (const std::invalid_argument& e) {
    fail("graph", e.what());
  }
}

GraphSpec parse_graph(const json& j) {
  if (!j.is_object()) throw ConfigError("graph: expected an object");
  GraphSpec spec;
  if (j.contains("builtin")) {
    spec.builtin = j["builtin"].get<std::string>();
    return spec;
  }
  if (j.contains("links")) {
    spec.nodes = require(j, "nodes", "graph").get<int>();
    spec.links = parse_pairs(j["links"], "graph.links");
    return spec;
  }
  if (j.contains("conflicts")) {
    spec.num_links = require(j, "num_links", "graph").get<int>();
    spec.conflicts = parse_pairs(j["conflicts"], "graph.conflicts");
    return spec;
  }
  throw ConfigError("graph: need one of 'builtin', 'links', 'conflicts'");
}

GraphSpec load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_graph(j);
}

WeightFunctionSpec parse_weight_kind(const std::string& kind, double theta) {
  try {
    if (kind == "log_over_loglog") return WeightFunctionSpec::log_over_loglog();
    if (kind == "log_power") return WeightFunctionSpec::log_power(theta);
    if (kind == "loglog") return WeightFunctionSpec::loglog();
    if (kind == "linear") return WeightFunctionSpec::linear();
    if (kind == "sqrt") return WeightFunctionSpec::sqrt();
  } catch (const std::invalid_argument& e) {
    fail("weight", e.what());
  }
  fail("weight.kind", "unknown kind '" + kind + "'");
}

ExperimentPlan parse_plan(const json& j) {
  if (!j.is_object()) throw ConfigError("plan: expected a JSON object");
  ExperimentPlan plan;
  plan.graph = parse_graph(require(j, "graph", "plan"));

  const json& weight = require(j, "weight", "plan");
  if (weight.contains("epsilon")) plan.epsilon = weight["epsilon"].get<double>();
  if (weight.contains("use_wmin")) plan.use_wmin = weight["use_wmin"].get<bool>();
  const json& kinds = require(weight, "kinds", "plan.weight");
  if (!kinds.is_array() || kinds.empty()) fail("plan.weight.kinds", "expected a nonempty array");
  for (const json& k : kinds) {
    if (k.is_string()) {
      plan.kinds.push_back(parse_weight_kind(k.get<std::string>(), 0.5));
    } else if (k.is_object()) {
      const double theta = k.contains("theta") ? k["theta"].get<double>() : 0.5;
      plan.kinds.push_back(parse_weight_kind(require(k, "kind", "plan.weight.kinds").get<std::string>(), theta));
    } else {
      fail("plan.weight.kinds", "entries must be strings or {kind, theta} objects");
    }
  }

  const json& arrival = require(j, "arrival", "plan");
  if (arrival.contains("lambda")) {
    plan.lambda = arrival["lambda"].get<std::vector<double>>();
    plan.rhos = {0.0};  // single run per (kind, seed)
  } else {
    plan.rhos = require(arrival, "rho", "plan.arrival").get<std::vector<double>>();
    if (plan.rhos.empty()) fail("plan.arrival.rho", "expected a nonempty array");
    const json& comps = require(arrival, "components", "plan.arrival");
    if (!comps.is_array() || comps.empty())
      fail("plan.arrival.components", "expected a nonempty array");
    for (const json& c : comps) {
      std::vector<int> ids = require(c, "links", "plan.arrival.components").get<std::vector<int>>();
      const double coeff = require(c, "c", "plan.arrival.components").get<double>();
      plan.components.push_back({std::move(ids), coeff});
    }
  }

  const json& sim = require(j, "sim", "plan");
  plan.horizon = require(sim, "horizon", "plan.sim").get<std::int64_t>();
  plan.seeds = require(sim, "seeds", "plan.sim").get<std::vector<std::uint64_t>>();
  if (plan.seeds.empty()) fail("plan.sim.seeds", "expected a nonempty array");
  if (sim.contains("record_every")) plan.record_every = sim["record_every"].get<std::int64_t>();
  if (sim.contains("oracle_every")) plan.oracle_every = sim["oracle_every"].get<std::int64_t>();
  if (sim.contains("frozen")) plan.frozen = sim["frozen"].get<bool>();
  if (sim.contains("mode")) plan.mode = sim["mode"].get<std::string>();
  if (plan.mode != "basic" && plan.mode != "distributed")
    fail("plan.sim.mode", "must be 'basic' or 'distributed'");

  if (j.contains("mac")) {
    const json& mac = j["mac"];
    if (mac.contains("mechanism")) {
      const std::string m = mac["mechanism"].get<std::string>();
      if (m == "bernoulli_half")
        plan.mac.mechanism = MacMechanism::kBernoulliHalf;
      else if (m == "windowed")
        plan.mac.mechanism = MacMechanism::kWindowed;
      else
        fail("mac.mechanism", "must be 'bernoulli_half' or 'windowed'");
    }
    if (mac.contains("window")) plan.mac.window = mac["window"].get<int>();
    if (mac.contains("data_slot")) plan.mac.data_slot = mac["data_slot"].get<double>();
    if (mac.contains("control_slot")) plan.mac.control_slot = mac["control_slot"].get<double>();
    if (plan.mac.window < 1) fail("mac.window", "must be >= 1");
  }
  if (plan.horizon < 1) fail("plan.sim.horizon", "must be >= 1");
  return plan;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_plan(j);
}

ArrivalConfig plan_arrivals(const ExperimentPlan& plan, const ConflictGraph& graph, double rho) {
  if (!plan.lambda.empty()) return ArrivalConfig::direct(plan.lambda);
  std::vector<std::pair<Schedule, double>> comps;
  for (const auto& [ids, coeff] : plan.components) {
    Schedule s(graph.num_links());
    for (int id : ids) {
      if (id < 1 || id > graph.num_links())
        throw ConfigError("arrival.components: link id " + std::to_string(id) +
                          " outside 1.." + std::to_string(graph.num_links()));
      s.set(id - 1);
    }
    comps.push_back({std::move(s), coeff});
  }
  return ArrivalConfig::scaled(rho, std::move(comps));
}

void write_trace_csv(const std::string& path, const RunResult& result, int num_links) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "t";
  for (int l = 1; l <= num_links; ++l) out << ",q" << l;
  out << ",x_mask,achieved_w,wstar\n";
  char buf[64];
  for (const SlotRecord& rec : result.records) {
    out << rec.t;
    for (std::int64_t q : rec.queues) out << ',' << q;
    out << ",0x" << rec.schedule.to_hex();
    std::snprintf(buf, sizeof(buf), "%.6f", rec.achieved_weight);
    out << ',' << buf << ',';
    if (rec.has_oracle) {
      std::snprintf(buf, sizeof(buf), "%.6f", rec.oracle_weight);
      out << buf;
    }
    out << '\n';
  }
}

nlohmann::json run_summary_json(const RunResult& result) {
  json j;
  j["horizon"] = result.horizon;
  j["time_avg_queue"] = result.time_avg_queue;
  j["max_total_queue"] = result.max_total_queue;
  j["max_link_queue"] = result.max_link_queue;
  j["final_queues"] = result.final_queues;
  j["mean_queue"] = result.mean_queue;
  j["service_rate"] = result.service_rate;
  j["arrival_rate"] = result.arrival_rate;
  j["bucket_avg_queue"] = result.bucket_avg_queue;
  if (!result.oracle_samples.empty()) {
    std::int64_t in_chi = 0;
    for (const OracleSample& s : result.oracle_samples)
      if (s.achieved < 0.8 * s.wstar) ++in_chi;
    j["oracle_samples"] = result.oracle_samples.size();
    j["chi_fraction_eps_0.2"] =
        static_cast<double>(in_chi) / static_cast<double>(result.oracle_samples.size());
  }
  return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace csma
