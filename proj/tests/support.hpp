#pragma once

// Brute-force oracles and instance generators shared by the unit tests and
// the acceptance runner. Nothing here calls the code under test except to
// build inputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "tension/conformation.hpp"
#include "tension/graph.hpp"
#include "tension/profiles.hpp"
#include "tension/synthetic.hpp"

namespace oracle {

using tension::Graph;
using tension::NodeId;
using tension::NodeSet;
using tension::ProfileMatrix;

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

/// All of `q` in one component of the graph induced by the `alive` bitmap.
inline bool connected_within(const Graph& g, const std::vector<char>& alive, const NodeSet& q) {
  UnionFind uf(g.node_count());
  for (auto [i, j] : g.edges())
    if (alive[i] && alive[j]) uf.unite(i, j);
  for (NodeId v : q)
    if (!alive[v] || uf.find(v) != uf.find(q[0])) return false;
  return true;
}

inline bool connected_set(const Graph& g, const NodeSet& u) {
  if (u.empty()) return false;
  return connected_within(g, u.mask(g.node_count()), u);
}

/// Exact equilibrium tension of G(u) by dense Gauss-Jordan elimination on
/// (I + D - A) f = x per column.
inline double exact_tension(const Graph& g, const ProfileMatrix& x, const NodeSet& u) {
  const std::size_t k = u.size();
  std::vector<std::size_t> local(g.node_count(), k);
  for (std::size_t a = 0; a < k; ++a) local[u[a]] = a;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (auto [i, j] : g.edges())
    if (local[i] < k && local[j] < k) edges.emplace_back(local[i], local[j]);
  double total = 0.0;
  for (std::size_t col = 0; col < x.cols(); ++col) {
    std::vector<std::vector<double>> m(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t a = 0; a < k; ++a) {
      m[a][a] = 1.0;
      m[a][k] = x(u[a], col);
    }
    for (auto [a, b] : edges) {
      m[a][a] += 1.0;
      m[b][b] += 1.0;
      m[a][b] -= 1.0;
      m[b][a] -= 1.0;
    }
    for (std::size_t p = 0; p < k; ++p) {
      std::size_t piv = p;
      for (std::size_t r = p + 1; r < k; ++r)
        if (std::abs(m[r][p]) > std::abs(m[piv][p])) piv = r;
      std::swap(m[p], m[piv]);
      for (std::size_t r = 0; r < k; ++r) {
        if (r == p) continue;
        double f = m[r][p] / m[p][p];
        for (std::size_t c = p; c <= k; ++c) m[r][c] -= f * m[p][c];
      }
    }
    std::vector<double> f(k);
    for (std::size_t a = 0; a < k; ++a) f[a] = m[a][k] / m[a][a];
    for (std::size_t a = 0; a < k; ++a) total += (x(u[a], col) - f[a]) * (x(u[a], col) - f[a]);
    for (auto [a, b] : edges) total += 2.0 * (f[a] - f[b]) * (f[a] - f[b]);
  }
  return total;
}

/// Calls `visit` on every connected node set containing `q` (n <= 20).
template <class F>
void for_each_connected_superset(const Graph& g, const NodeSet& q, F&& visit) {
  const std::size_t n = g.node_count();
  std::vector<NodeId> free;
  for (NodeId v = 0; v < n; ++v)
    if (!q.contains(v)) free.push_back(v);
  for (std::uint32_t bits = 0; bits < (1u << free.size()); ++bits) {
    std::vector<NodeId> members(q.begin(), q.end());
    for (std::size_t b = 0; b < free.size(); ++b)
      if (bits >> b & 1u) members.push_back(free[b]);
    NodeSet u(std::move(members));
    if (connected_set(g, u)) visit(u);
  }
}

/// Minimum tension over connected supersets of `q`, or nullopt if none.
inline std::optional<double> optimum_tension(const Graph& g, const ProfileMatrix& x, const NodeSet& q) {
  std::optional<double> best;
  for_each_connected_superset(g, q, [&](const NodeSet& u) {
    double t = exact_tension(g, x, u);
    if (!best || t < *best) best = t;
  });
  return best;
}

/// Edges of a minimum Steiner tree for `q`: the smallest connected superset
/// minus one.
inline std::optional<std::size_t> steiner_edges(const Graph& g, const NodeSet& q) {
  std::optional<std::size_t> best;
  for_each_connected_superset(g, q, [&](const NodeSet& u) {
    if (!best || u.size() - 1 < *best) best = u.size() - 1;
  });
  return best;
}

/// Minimum spanning-tree weight of a complete graph given as a dense matrix,
/// by enumerating every (k-1)-edge subset.
inline double brute_force_mst_weight(const std::vector<std::vector<double>>& w) {
  const std::size_t k = w.size();
  if (k <= 1) return 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) all.emplace_back(a, b);
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> pick(all.size(), 0);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(k - 1), pick.end(), 1);
  do {
    UnionFind uf(k);
    double total = 0.0;
    std::size_t joined = 0;
    for (std::size_t e = 0; e < all.size(); ++e)
      if (pick[e]) {
        auto [a, b] = all[e];
        if (uf.find(a) != uf.find(b)) ++joined;
        uf.unite(a, b);
        total += w[a][b];
      }
    if (joined == k - 1) best = std::min(best, total);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

/// Hop distances by repeated relaxation over the edge list (Bellman-Ford).
inline std::vector<std::size_t> hop_distances(const Graph& g, NodeId src) {
  const std::size_t inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> d(g.node_count(), inf);
  d[src] = 0;
  auto edges = g.edges();
  for (std::size_t round = 0; round < g.node_count(); ++round)
    for (auto [i, j] : edges) {
      if (d[i] != inf) d[j] = std::min(d[j], d[i] + 1);
      if (d[j] != inf) d[i] = std::min(d[i], d[j] + 1);
    }
  return d;
}

inline ProfileMatrix random_profiles(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ProfileMatrix p(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < m; ++a) p(i, a) = unit(rng);
  return p;
}

/// `k` distinct nodes drawn from the largest component.
inline NodeSet random_seeds(const Graph& g, std::size_t k, std::mt19937_64& rng) {
  NodeSet lcc = tension::largest_component(g);
  std::vector<NodeId> pick;
  std::sample(lcc.begin(), lcc.end(), std::back_inserter(pick),
              static_cast<std::ptrdiff_t>(std::min(k, lcc.size())), rng);
  return NodeSet(std::move(pick));
}

}  // namespace oracle
