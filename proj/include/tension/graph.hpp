#pragma once

// Undirected simple graphs in CSR form, node sets, per-edge weight overlays
// and the traversal primitives every solver builds on.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tension/error.hpp"

namespace tension {

using NodeId = std::uint32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Immutable undirected simple graph over nodes 0..node_count()-1.
///
/// Neighbor lists are sorted ascending. Construction drops duplicate and
/// reversed pairs; a self-loop is an input error.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  Graph(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges)
      : offsets_(node_count + 1, 0) {
    std::vector<std::pair<NodeId, NodeId>> arcs;
    arcs.reserve(edges.size() * 2);
    for (auto [a, b] : edges) {
      if (a >= node_count || b >= node_count)
        fail(ErrorKind::input, "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                   ") references a node outside 0.." +
                                   std::to_string(node_count) + "-1");
      if (a == b) fail(ErrorKind::input, "self-loop on node " + std::to_string(a));
      arcs.emplace_back(a, b);
      arcs.emplace_back(b, a);
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    targets_.reserve(arcs.size());
    for (auto [a, b] : arcs) {
      ++offsets_[a + 1];
      targets_.push_back(b);
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  }

  Graph(std::size_t node_count, const std::vector<std::pair<NodeId, NodeId>>& edges)
      : Graph(node_count, std::span<const std::pair<NodeId, NodeId>>(edges)) {}

  std::size_t node_count() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }

  /// Index of the arc i->j in the flat adjacency array, or npos.
  std::size_t slot(NodeId i, NodeId j) const {
    auto nb = neighbors(i);
    auto it = std::lower_bound(nb.begin(), nb.end(), j);
    if (it == nb.end() || *it != j) return npos;
    return offsets_[i] + static_cast<std::size_t>(it - nb.begin());
  }
  std::size_t slot_begin(NodeId i) const { return offsets_[i]; }

  bool has_edge(NodeId i, NodeId j) const {
    return i < node_count() && j < node_count() && slot(i, j) != npos;
  }
  bool contains(NodeId i) const noexcept { return i < node_count(); }

  /// Every undirected edge once, as (i, j) with i < j, in lexicographic order.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count());
    for (NodeId i = 0; i < node_count(); ++i)
      for (NodeId j : neighbors(i))
        if (i < j) out.emplace_back(i, j);
    return out;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

/// Sorted, duplicate-free set of node ids.
class NodeSet {
 public:
  NodeSet() = default;
  NodeSet(std::vector<NodeId> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }
  NodeSet(std::initializer_list<NodeId> members)
      : NodeSet(std::vector<NodeId>(members)) {}

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(NodeId i) const {
    return std::binary_search(members_.begin(), members_.end(), i);
  }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }
  NodeId operator[](std::size_t k) const { return members_[k]; }
  const std::vector<NodeId>& members() const noexcept { return members_; }

  bool includes(const NodeSet& other) const {
    return std::includes(begin(), end(), other.begin(), other.end());
  }

  /// Membership bitmap over 0..n-1.
  std::vector<char> mask(std::size_t n) const {
    std::vector<char> m(n, 0);
    for (NodeId i : members_) m[i] = 1;
    return m;
  }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

 private:
  std::vector<NodeId> members_;
};

inline void require_within(const Graph& g, const NodeSet& u, const char* what) {
  if (!u.empty() && u.members().back() >= g.node_count())
    fail(ErrorKind::input, std::string(what) + " contains node " +
                               std::to_string(u.members().back()) +
                               " outside the graph");
}

/// Nonnegative real per undirected edge, stored per arc slot so that both
/// directions always read the same value.
class EdgeWeights {
 public:
  EdgeWeights() = default;

  /// `f(i, j)` is evaluated once per edge with i < j.
  template <typename F>
  static EdgeWeights from_function(const Graph& g, F&& f) {
    EdgeWeights w;
    w.values_.assign(g.edge_count() * 2, 0.0);
    for (NodeId i = 0; i < g.node_count(); ++i) {
      auto nb = g.neighbors(i);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        NodeId j = nb[k];
        if (i < j) {
          double v = f(i, j);
          w.values_[g.slot_begin(i) + k] = v;
          w.values_[g.slot(j, i)] = v;
        }
      }
    }
    return w;
  }

  static EdgeWeights unit(const Graph& g) {
    return from_function(g, [](NodeId, NodeId) { return 1.0; });
  }

  double at_slot(std::size_t s) const { return values_[s]; }
  double operator()(const Graph& g, NodeId i, NodeId j) const {
    std::size_t s = g.slot(i, j);
    if (s == Graph::npos)
      fail(ErrorKind::input, "no edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    return values_[s];
  }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
};

struct Subgraph {
  Graph graph;
  std::vector<NodeId> to_original;  // new id -> original id
};

/// G(U): the nodes of `u` relabeled 0..|u|-1 in ascending original order,
/// with exactly the edges of `g` that have both endpoints in `u`.
inline Subgraph induced_subgraph(const Graph& g, const NodeSet& u) {
  if (u.empty()) fail(ErrorKind::input, "empty node set");
  require_within(g, u, "node set");
  constexpr NodeId absent = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> to_local(g.node_count(), absent);
  for (std::size_t k = 0; k < u.size(); ++k) to_local[u[k]] = static_cast<NodeId>(k);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i : u)
    for (NodeId j : g.neighbors(i))
      if (i < j && to_local[j] != absent) edges.emplace_back(to_local[i], to_local[j]);
  return {Graph(u.size(), edges), u.members()};
}

/// Number of edges of `g` with both endpoints in `u`.
inline std::size_t induced_edge_count(const Graph& g, const NodeSet& u) {
  auto in = u.mask(g.node_count());
  std::size_t count = 0;
  for (NodeId i : u)
    for (NodeId j : g.neighbors(i))
      if (i < j && in[j]) ++count;
  return count;
}

struct Path {
  std::vector<NodeId> nodes;
  double length = 0.0;
};

/// Distances (and hop counts along the chosen optimum) from every node to a
/// fixed target. Optimal paths are ranked by (length, hops) and then by
/// lexicographic node sequence, which makes every reconstructed path
/// deterministic even with zero-weight edges.
class PathTree {
 public:
  /// Hop-count lengths (BFS). A nonempty `alive` bitmap restricts the search
  /// to the marked nodes.
  PathTree(const Graph& g, NodeId target, std::span<const char> alive = {})
      : graph_(&g), weights_(nullptr), target_(target) {
    check_node(g, target);
    dist_.assign(g.node_count(), kInfinity);
    hops_.assign(g.node_count(), kUnreached);
    std::vector<NodeId> queue{target};
    dist_[target] = 0.0;
    hops_[target] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      NodeId u = queue[head];
      for (NodeId v : g.neighbors(u)) {
        if (hops_[v] != kUnreached || (!alive.empty() && !alive[v])) continue;
        hops_[v] = hops_[u] + 1;
        dist_[v] = static_cast<double>(hops_[v]);
        queue.push_back(v);
      }
    }
  }

  /// Weighted lengths (Dijkstra), optionally restricted like the BFS form.
  PathTree(const Graph& g, const EdgeWeights& w, NodeId target, std::span<const char> alive = {})
      : graph_(&g), weights_(&w), target_(target) {
    check_node(g, target);
    dist_.assign(g.node_count(), kInfinity);
    hops_.assign(g.node_count(), kUnreached);
    using Entry = std::tuple<double, std::uint32_t, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist_[target] = 0.0;
    hops_[target] = 0;
    heap.emplace(0.0, 0u, target);
    std::vector<char> done(g.node_count(), 0);
    while (!heap.empty()) {
      auto [d, h, u] = heap.top();
      heap.pop();
      if (done[u]) continue;
      done[u] = 1;
      auto nb = g.neighbors(u);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        NodeId v = nb[k];
        if (done[v] || (!alive.empty() && !alive[v])) continue;
        double nd = d + w.at_slot(g.slot_begin(u) + k);
        std::uint32_t nh = h + 1;
        if (nd < dist_[v] || (nd == dist_[v] && nh < hops_[v])) {
          dist_[v] = nd;
          hops_[v] = nh;
          heap.emplace(nd, nh, v);
        }
      }
    }
  }

  NodeId target() const noexcept { return target_; }
  double distance(NodeId from) const { return dist_[from]; }
  bool reachable(NodeId from) const { return hops_[from] != kUnreached; }
  std::uint32_t hops(NodeId from) const { return hops_[from]; }

  /// The lexicographically smallest optimal path from `from` to the target.
  Path path_from(NodeId from) const {
    check_node(*graph_, from);
    if (!reachable(from)) fail(ErrorKind::infeasible, "disconnected pair");
    Path p;
    p.nodes.push_back(from);
    p.length = dist_[from];
    NodeId u = from;
    while (u != target_) {
      auto nb = graph_->neighbors(u);
      NodeId next = u;
      for (std::size_t k = 0; k < nb.size(); ++k) {
        NodeId v = nb[k];
        if (hops_[v] == kUnreached || hops_[v] + 1 != hops_[u]) continue;
        double step = weights_ ? weights_->at_slot(graph_->slot_begin(u) + k) : 1.0;
        if (dist_[v] + step == dist_[u]) {
          next = v;  // neighbors are sorted, so the first match is smallest
          break;
        }
      }
      u = next;
      p.nodes.push_back(u);
    }
    return p;
  }

 private:
  static constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

  static void check_node(const Graph& g, NodeId i) {
    if (!g.contains(i)) fail(ErrorKind::input, "invalid node id " + std::to_string(i));
  }

  const Graph* graph_;
  const EdgeWeights* weights_;
  NodeId target_;
  std::vector<double> dist_;
  std::vector<std::uint32_t> hops_;
};

/// Shortest src->dst path under hop counts.
inline Path shortest_path(const Graph& g, NodeId src, NodeId dst) {
  return PathTree(g, dst).path_from(src);
}

/// Shortest src->dst path under nonnegative edge lengths.
inline Path shortest_path(const Graph& g, NodeId src, NodeId dst, const EdgeWeights& lengths) {
  return PathTree(g, lengths, dst).path_from(src);
}

/// Unweighted BFS hop distances from `src`; -1 marks unreachable nodes.
inline std::vector<int> bfs_distances(const Graph& g, NodeId src) {
  std::vector<int> dist(g.node_count(), -1);
  std::vector<NodeId> queue{src};
  dist[src] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId u = queue[head];
    for (NodeId v : g.neighbors(u))
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

/// Symmetric k x k matrix of pairwise lengths.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t k) : k_(k), values_(k * k, 0.0) {}
  std::size_t size() const noexcept { return k_; }
  double operator()(std::size_t a, std::size_t b) const { return values_[a * k_ + b]; }
  void set(std::size_t a, std::size_t b, double v) {
    values_[a * k_ + b] = v;
    values_[b * k_ + a] = v;
  }

 private:
  std::size_t k_;
  std::vector<double> values_;
};

struct TreeEdge {
  std::size_t a;
  std::size_t b;
  double weight;
  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

/// Minimum spanning tree of the complete graph over 0..k-1 (Kruskal).
/// Equal weights are resolved by (a, b) lexicographic order, a < b.
inline std::vector<TreeEdge> minimum_spanning_tree(const DistanceMatrix& h) {
  const std::size_t k = h.size();
  if (k == 0) fail(ErrorKind::input, "empty node set");
  std::vector<TreeEdge> candidates;
  candidates.reserve(k * (k - 1) / 2);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      double w = h(a, b);
      if (!(w < kInfinity)) fail(ErrorKind::infeasible, "seeds in different components");
      candidates.push_back({a, b, w});
    }
  std::sort(candidates.begin(), candidates.end(), [](const TreeEdge& x, const TreeEdge& y) {
    return std::tie(x.weight, x.a, x.b) < std::tie(y.weight, y.a, y.b);
  });
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<TreeEdge> tree;
  tree.reserve(k - 1);
  for (const auto& e : candidates) {
    auto ra = find(e.a), rb = find(e.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    tree.push_back(e);
    if (tree.size() + 1 == k) break;
  }
  return tree;
}

/// True iff every node of `q` lies in one connected component of G(alive),
/// where `alive` is a membership bitmap.
inline bool seeds_connected(const Graph& g, std::span<const char> alive, const NodeSet& q) {
  if (q.size() <= 1) return true;
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeId> stack{q[0]};
  seen[q[0]] = 1;
  std::size_t found = 1;
  auto is_seed = q.mask(g.node_count());
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : g.neighbors(u)) {
      if (seen[v] || !alive[v]) continue;
      seen[v] = 1;
      if (is_seed[v] && ++found == q.size()) return true;
      stack.push_back(v);
    }
  }
  return false;
}

inline bool is_connected_within(const Graph& g, const NodeSet& alive, const NodeSet& q) {
  require_within(g, alive, "candidate set");
  if (!alive.includes(q)) fail(ErrorKind::input, "seed outside candidate set");
  auto mask = alive.mask(g.node_count());
  return seeds_connected(g, mask, q);
}

/// True iff G(u) is connected (an empty set is not).
inline bool is_connected_set(const Graph& g, const NodeSet& u) {
  if (u.empty()) return false;
  return is_connected_within(g, u, u);
}

/// Component label per node, labels assigned in order of smallest member.
inline std::vector<std::uint32_t> component_labels(const Graph& g, std::uint32_t* count = nullptr) {
  constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(g.node_count(), unset);
  std::uint32_t next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u))
        if (label[v] == unset) {
          label[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

/// Nodes of the largest connected component; the earliest component wins ties.
inline NodeSet largest_component(const Graph& g) {
  if (g.node_count() == 0) return {};
  std::uint32_t count = 0;
  auto label = component_labels(g, &count);
  std::vector<std::size_t> sizes(count, 0);
  for (auto l : label) ++sizes[l];
  auto best = static_cast<std::uint32_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<NodeId> members;
  members.reserve(sizes[best]);
  for (NodeId i = 0; i < g.node_count(); ++i)
    if (label[i] == best) members.push_back(i);
  return NodeSet(std::move(members));
}

}  // namespace tension
