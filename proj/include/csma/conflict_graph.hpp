#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace csma {

// A set of links (e.g. the links transmitting in one slot), stored as a
// bitset over link indices 0..N-1. Schedules order as the integer value
// of the bitset with link 0 in the least significant bit; that ordering
// is the canonical state order used by every enumeration and kernel.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(int num_links);
  static Schedule from_indices(int num_links, std::initializer_list<int> links);
  static Schedule from_indices(int num_links, const std::vector<int>& links);

  int num_links() const { return num_links_; }
  bool test(int link) const;
  void set(int link, bool value = true);
  int count() const;
  bool none() const;
  bool intersects(const Schedule& other) const;
  Schedule set_minus(const Schedule& other) const;
  Schedule set_union(const Schedule& other) const;
  Schedule sym_diff(const Schedule& other) const;
  bool contains(const Schedule& subset) const;
  std::vector<int> indices() const;

  // mask of links 0..63; every enumerable instance fits
  std::uint64_t low_word() const;
  std::string to_hex() const;

  bool operator==(const Schedule& other) const;
  std::strong_ordering operator<=>(const Schedule& other) const;

 private:
  void check_link(int link) const;
  int num_links_ = 0;
  std::vector<std::uint64_t> words_;
};

// Conflict graph over links: vertices are links, an edge means the two
// links cannot transmit in the same slot. Feasible schedules are exactly
// the independent sets.
class ConflictGraph {
 public:
  static constexpr int kDefaultEnumerationCap = 20;

  ConflictGraph(int num_links, const std::vector<std::pair<int, int>>& conflict_edges);

  // Build the one-hop interference graph of a network: links are indexed
  // by their position in link_endpoints, and two links conflict iff they
  // share a node.
  static ConflictGraph from_links(int node_count,
                                  const std::vector<std::pair<int, int>>& link_endpoints);

  int num_links() const { return num_links_; }
  int num_conflict_edges() const { return num_edges_; }
  const std::vector<int>& neighbors(int link) const;
  const Schedule& neighbor_mask(int link) const;
  bool are_neighbors(int a, int b) const;

  bool is_independent(const Schedule& s) const;
  // True iff no single link can be added while keeping independence.
  // Throws if s itself is not independent.
  bool is_maximal(const Schedule& s) const;

  // All independent sets in canonical order (ascending bitset value).
  // Throws if num_links exceeds the cap.
  std::vector<Schedule> enumerate_independent_sets(int cap = kDefaultEnumerationCap) const;

 private:
  int num_links_ = 0;
  int num_edges_ = 0;
  std::vector<std::vector<int>> adjacency_;
  std::vector<Schedule> neighbor_masks_;
};

// The 4x4 grid network: 16 nodes, 24 links with canonical ids 1..24
// (row-major: 3 horizontal links of row 1, then the 4 verticals between
// rows 1-2, then row 2's horizontals, and so on). The conflict graph is
// one-hop interference, which gives 52 conflict edges.
struct GridNetwork {
  static constexpr int kNodes = 16;
  static constexpr int kLinks = 24;

  std::vector<std::pair<int, int>> links;  // node pairs, 0-based nodes; index = id-1
  ConflictGraph graph;

  // Convert 1-based canonical link ids to a Schedule.
  Schedule schedule_from_ids(const std::vector<int>& one_based_ids) const;

  // The four canonical maximal schedules used by the grid experiments
  // (each is a perfect matching of the grid), as 1-based link ids.
  static const std::array<std::array<int, 8>, 4>& maximal_schedules();
};

GridNetwork build_grid_4x4();

}  // namespace csma
