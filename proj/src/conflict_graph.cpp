#include "csma/conflict_graph.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>

namespace csma {

namespace {
int word_count(int num_links) { return (num_links + 63) / 64; }
}  // namespace

Schedule::Schedule(int num_links) : num_links_(num_links) {
  if (num_links < 0) throw std::invalid_argument("Schedule: negative size");
  words_.assign(word_count(num_links), 0);
}

Schedule Schedule::from_indices(int num_links, std::initializer_list<int> links) {
  return from_indices(num_links, std::vector<int>(links));
}

Schedule Schedule::from_indices(int num_links, const std::vector<int>& links) {
  Schedule s(num_links);
  for (int l : links) s.set(l);
  return s;
}

void Schedule::check_link(int link) const {
  if (link < 0 || link >= num_links_) throw std::out_of_range("Schedule: link index out of range");
}

bool Schedule::test(int link) const {
  check_link(link);
  return (words_[link >> 6] >> (link & 63)) & 1ULL;
}

void Schedule::set(int link, bool value) {
  check_link(link);
  const std::uint64_t bit = 1ULL << (link & 63);
  if (value)
    words_[link >> 6] |= bit;
  else
    words_[link >> 6] &= ~bit;
}

int Schedule::count() const {
  int c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

bool Schedule::none() const {
  for (auto w : words_)
    if (w) return false;
  return true;
}

bool Schedule::intersects(const Schedule& other) const {
  const std::size_t n = std::min(words_.size(), other.words_.size());
  for (std::size_t k = 0; k < n; ++k)
    if (words_[k] & other.words_[k]) return true;
  return false;
}

Schedule Schedule::set_minus(const Schedule& other) const {
  Schedule r = *this;
  const std::size_t n = std::min(words_.size(), other.words_.size());
  for (std::size_t k = 0; k < n; ++k) r.words_[k] &= ~other.words_[k];
  return r;
}

Schedule Schedule::set_union(const Schedule& other) const {
  Schedule r = *this;
  const std::size_t n = std::min(words_.size(), other.words_.size());
  for (std::size_t k = 0; k < n; ++k) r.words_[k] |= other.words_[k];
  return r;
}

Schedule Schedule::sym_diff(const Schedule& other) const {
  Schedule r = *this;
  const std::size_t n = std::min(words_.size(), other.words_.size());
  for (std::size_t k = 0; k < n; ++k) r.words_[k] ^= other.words_[k];
  return r;
}

bool Schedule::contains(const Schedule& subset) const {
  const std::size_t n = std::max(words_.size(), subset.words_.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t mine = k < words_.size() ? words_[k] : 0;
    const std::uint64_t theirs = k < subset.words_.size() ? subset.words_[k] : 0;
    if (theirs & ~mine) return false;
  }
  return true;
}

std::vector<int> Schedule::indices() const {
  std::vector<int> out;
  for (int l = 0; l < num_links_; ++l)
    if ((words_[l >> 6] >> (l & 63)) & 1ULL) out.push_back(l);
  return out;
}

std::uint64_t Schedule::low_word() const { return words_.empty() ? 0 : words_[0]; }

std::string Schedule::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  bool started = false;
  for (int k = static_cast<int>(words_.size()) - 1; k >= 0; --k) {
    for (int nib = 15; nib >= 0; --nib) {
      const int d = static_cast<int>((words_[k] >> (4 * nib)) & 0xF);
      if (!started && d == 0 && !(k == 0 && nib == 0)) continue;
      started = true;
      s.push_back(digits[d]);
    }
  }
  return "0x" + s;
}

bool Schedule::operator==(const Schedule& other) const {
  return num_links_ == other.num_links_ && words_ == other.words_;
}

std::strong_ordering Schedule::operator<=>(const Schedule& other) const {
  // integer value of the bitset: compare high words first
  const std::size_t n = std::max(words_.size(), other.words_.size());
  for (std::size_t k = n; k-- > 0;) {
    const std::uint64_t a = k < words_.size() ? words_[k] : 0;
    const std::uint64_t b = k < other.words_.size() ? other.words_[k] : 0;
    if (a != b) return a < b ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

ConflictGraph::ConflictGraph(int num_links, const std::vector<std::pair<int, int>>& conflict_edges)
    : num_links_(num_links) {
  if (num_links <= 0) throw std::invalid_argument("ConflictGraph: need at least one link");
  adjacency_.assign(num_links, {});
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : conflict_edges) {
    if (a < 0 || a >= num_links || b < 0 || b >= num_links)
      throw std::invalid_argument("ConflictGraph: conflict edge endpoint out of range");
    if (a == b) throw std::invalid_argument("ConflictGraph: self-conflict is not allowed");
    auto key = std::minmax(a, b);
    if (!seen.insert(key).second)
      throw std::invalid_argument("ConflictGraph: duplicate conflict edge");
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  num_edges_ = static_cast<int>(seen.size());
  neighbor_masks_.reserve(num_links);
  for (int l = 0; l < num_links; ++l) {
    std::sort(adjacency_[l].begin(), adjacency_[l].end());
    neighbor_masks_.push_back(Schedule::from_indices(num_links, adjacency_[l]));
  }
}

ConflictGraph ConflictGraph::from_links(int node_count,
                                        const std::vector<std::pair<int, int>>& link_endpoints) {
  if (node_count <= 0) throw std::invalid_argument("from_links: need at least one node");
  if (link_endpoints.empty()) throw std::invalid_argument("from_links: need at least one link");
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : link_endpoints) {
    if (u < 0 || u >= node_count || v < 0 || v >= node_count)
      throw std::invalid_argument("from_links: dangling link endpoint");
    if (u == v) throw std::invalid_argument("from_links: a link must join two distinct nodes");
    if (!seen.insert(std::minmax(u, v)).second)
      throw std::invalid_argument("from_links: duplicate link");
  }
  const int n = static_cast<int>(link_endpoints.size());
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      auto [u1, v1] = link_endpoints[a];
      auto [u2, v2] = link_endpoints[b];
      if (u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2) edges.emplace_back(a, b);
    }
  return ConflictGraph(n, edges);
}

const std::vector<int>& ConflictGraph::neighbors(int link) const {
  if (link < 0 || link >= num_links_) throw std::out_of_range("neighbors: link out of range");
  return adjacency_[link];
}

const Schedule& ConflictGraph::neighbor_mask(int link) const {
  if (link < 0 || link >= num_links_) throw std::out_of_range("neighbor_mask: link out of range");
  return neighbor_masks_[link];
}

bool ConflictGraph::are_neighbors(int a, int b) const {
  if (a < 0 || a >= num_links_ || b < 0 || b >= num_links_)
    throw std::out_of_range("are_neighbors: link out of range");
  return std::binary_search(adjacency_[a].begin(), adjacency_[a].end(), b);
}

bool ConflictGraph::is_independent(const Schedule& s) const {
  if (s.num_links() != num_links_) throw std::invalid_argument("is_independent: size mismatch");
  for (int l : s.indices())
    if (neighbor_masks_[l].intersects(s)) return false;
  return true;
}

bool ConflictGraph::is_maximal(const Schedule& s) const {
  if (!is_independent(s)) throw std::invalid_argument("is_maximal: schedule is not independent");
  for (int l = 0; l < num_links_; ++l) {
    if (s.test(l)) continue;
    if (!neighbor_masks_[l].intersects(s)) return false;
  }
  return true;
}

std::vector<Schedule> ConflictGraph::enumerate_independent_sets(int cap) const {
  if (num_links_ > cap) throw std::invalid_argument("enumerate_independent_sets: graph exceeds enumeration cap");
  if (num_links_ > 63) throw std::invalid_argument("enumerate_independent_sets: cap above 63 unsupported");
  std::vector<std::uint64_t> nmask(num_links_);
  for (int l = 0; l < num_links_; ++l) nmask[l] = neighbor_masks_[l].low_word();
  std::vector<Schedule> out;
  const std::uint64_t end = 1ULL << num_links_;
  for (std::uint64_t mask = 0; mask < end; ++mask) {
    bool ok = true;
    for (std::uint64_t rest = mask; rest; rest &= rest - 1) {
      const int l = std::countr_zero(rest);
      if (nmask[l] & mask) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Schedule s(num_links_);
    for (std::uint64_t rest = mask; rest; rest &= rest - 1) s.set(std::countr_zero(rest));
    out.push_back(std::move(s));
  }
  return out;
}

namespace {
// Node ids are row-major: node(r,c) = 4*r + c for r,c in 0..3.
std::vector<std::pair<int, int>> grid_links() {
  auto node = [](int r, int c) { return 4 * r + c; };
  std::vector<std::pair<int, int>> links;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) links.emplace_back(node(r, c), node(r, c + 1));  // horizontals
    if (r < 3)
      for (int c = 0; c < 4; ++c) links.emplace_back(node(r, c), node(r + 1, c));  // verticals
  }
  return links;
}
}  // namespace

GridNetwork build_grid_4x4() {
  auto links = grid_links();
  ConflictGraph g = ConflictGraph::from_links(GridNetwork::kNodes, links);
  return GridNetwork{std::move(links), std::move(g)};
}

Schedule GridNetwork::schedule_from_ids(const std::vector<int>& one_based_ids) const {
  Schedule s(kLinks);
  for (int id : one_based_ids) {
    if (id < 1 || id > kLinks) throw std::invalid_argument("schedule_from_ids: id out of range");
    s.set(id - 1);
  }
  return s;
}

const std::array<std::array<int, 8>, 4>& GridNetwork::maximal_schedules() {
  static const std::array<std::array<int, 8>, 4> m = {{
      {1, 3, 8, 10, 15, 17, 22, 24},
      {4, 5, 6, 7, 18, 19, 20, 21},
      {1, 3, 9, 11, 14, 16, 22, 24},
      {2, 4, 7, 12, 13, 18, 21, 23},
  }};
  return m;
}

}  // namespace csma
