#pragma once

// Solvers for finding a connected, low-tension community around a set of
// seed nodes.
//
// Conforming profiles for every candidate subgraph is too expensive, so the
// search works on a proxy: each edge is weighted by the distance between the
// latent profiles of its endpoints. Only the final node set is conformed and
// scored (`evaluate_solution`).
//
// QTree connects the seeds optimistically through a Steiner-tree style
// construction: shortest paths between all seed pairs, a minimum spanning
// tree over those distances, and the union of the tree's paths.
//
// QPeel works pessimistically from the whole graph down: it repeatedly takes
// the highest-scoring candidate and drops it unless that would separate the
// seeds, pruning nodes that lose all their neighbors along the way.

#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tension/conformation.hpp"
#include "tension/error.hpp"
#include "tension/graph.hpp"
#include "tension/profiles.hpp"

namespace tension {

enum class WeightNorm { l2, l1, max };

/// Proxy edge weights from latent profiles: |x_i - x_j| for one attribute,
/// and the chosen norm of x_i - x_j for several (all norms agree when m = 1).
inline EdgeWeights proxy_weights(const Graph& g, const ProfileMatrix& latent,
                                 WeightNorm norm = WeightNorm::l2) {
  require_rows(g, latent, "latent profile matrix");
  return EdgeWeights::from_function(g, [&](NodeId i, NodeId j) {
    auto xi = latent.row(i);
    auto xj = latent.row(j);
    if (xi.size() == 1) return std::abs(xi[0] - xj[0]);
    double acc = 0.0;
    for (std::size_t a = 0; a < xi.size(); ++a) {
      double d = std::abs(xi[a] - xj[a]);
      switch (norm) {
        case WeightNorm::l2: acc += d * d; break;
        case WeightNorm::l1: acc += d; break;
        case WeightNorm::max: acc = std::max(acc, d); break;
      }
    }
    return norm == WeightNorm::l2 ? std::sqrt(acc) : acc;
  });
}

enum class PathLength { hops, weight_sum };
enum class PeelScore { random, weight_sum, weight_max };

/// One of the five community-search algorithms.
enum class Algorithm { qtree_hops, qtree_weight, qpeel_random, qpeel_sum, qpeel_max };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::qtree_hops, Algorithm::qtree_weight,
                                               Algorithm::qpeel_random, Algorithm::qpeel_sum,
                                               Algorithm::qpeel_max};

/// Display tag, e.g. "QTree(e)".
inline std::string_view algorithm_tag(Algorithm a) {
  switch (a) {
    case Algorithm::qtree_hops: return "QTree(e)";
    case Algorithm::qtree_weight: return "QTree(s)";
    case Algorithm::qpeel_random: return "QPeel(r)";
    case Algorithm::qpeel_sum: return "QPeel(s)";
    case Algorithm::qpeel_max: return "QPeel(m)";
  }
  return "?";
}

/// Command-line spelling, e.g. "qtree-e".
inline std::string_view algorithm_key(Algorithm a) {
  switch (a) {
    case Algorithm::qtree_hops: return "qtree-e";
    case Algorithm::qtree_weight: return "qtree-s";
    case Algorithm::qpeel_random: return "qpeel-r";
    case Algorithm::qpeel_sum: return "qpeel-s";
    case Algorithm::qpeel_max: return "qpeel-m";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view key) {
  for (Algorithm a : kAllAlgorithms)
    if (key == algorithm_key(a) || key == algorithm_tag(a)) return a;
  return std::nullopt;
}

/// Profile-aware variants read the proxy weights; the others never do.
inline bool is_profile_aware(Algorithm a) {
  return a == Algorithm::qtree_weight || a == Algorithm::qpeel_sum || a == Algorithm::qpeel_max;
}

struct Solution {
  NodeSet nodes;
  std::size_t edges_induced = 0;
  double tension = 0.0;
  ProfileMatrix conformed;  // rows follow the ascending order of `nodes`
  std::string algorithm_tag;
};

namespace detail {

inline void require_seeds(const Graph& g, const NodeSet& q) {
  if (q.empty()) fail(ErrorKind::input, "empty seed set");
  require_within(g, q, "seed set");
}

}  // namespace detail

namespace detail {

/// Union of the paths of a spanning tree over the seed metric closure, or
/// nullopt when some seeds are not connected. `alive`, when nonempty,
/// restricts the searches to the marked nodes.
inline std::optional<std::vector<NodeId>> seed_connector(const Graph& g, const EdgeWeights& w,
                                                         const NodeSet& q, PathLength length,
                                                         std::span<const char> alive = {}) {
  const std::size_t k = q.size();
  if (k == 1) return q.members();

  std::vector<PathTree> trees;
  trees.reserve(k);
  for (NodeId s : q) {
    if (length == PathLength::hops)
      trees.emplace_back(g, s, alive);
    else
      trees.emplace_back(g, w, s, alive);
  }
  DistanceMatrix closure(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      if (!trees[b].reachable(q[a])) return std::nullopt;
      closure.set(a, b, trees[b].distance(q[a]));
    }

  std::vector<NodeId> members;
  for (const TreeEdge& e : minimum_spanning_tree(closure)) {
    Path p = trees[e.b].path_from(q[e.a]);
    members.insert(members.end(), p.nodes.begin(), p.nodes.end());
  }
  return members;
}

}  // namespace detail

/// Node set of the QTree connector for seeds `q`.
inline NodeSet qtree_search(const Graph& g, const EdgeWeights& w, const NodeSet& q,
                            PathLength length) {
  detail::require_seeds(g, q);
  auto members = detail::seed_connector(g, w, q, length);
  if (!members) fail(ErrorKind::infeasible, "seeds in different components");
  return NodeSet(std::move(*members));
}

/// How QPeel decides whether dropping a node separates the seeds. Both give
/// identical results.
///
/// `maintained_tree` keeps a QTree connector of the seeds within the
/// surviving nodes: hop lengths for the random score, which never reads
/// weights, and weight sums for the weight-based scores. Dropping a node off
/// that tree cannot separate the seeds; dropping a tree node triggers a
/// rebuild, which fails exactly when the seeds are separated. `full_search`
/// runs one graph search per pick instead.
enum class PeelConnectivity { maintained_tree, full_search };

namespace detail {

class SeedConnectivity {
 public:
  SeedConnectivity(const Graph& g, const EdgeWeights& w, const NodeSet& q,
                   const std::vector<char>& alive, PeelConnectivity mode, PathLength tree_length)
      : g_(g), w_(w), q_(q), alive_(alive), mode_(mode), tree_length_(tree_length), is_seed_(q.mask(g.node_count())),
        in_tree_(g.node_count(), 0), stamp_(g.node_count(), 0) {
    bool ok = mode == PeelConnectivity::maintained_tree ? rebuild_tree() : reach_all();
    if (!ok) fail(ErrorKind::infeasible, "seeds disconnected");
  }

  /// Whether the seeds are still connected after `alive` dropped `v`.
  bool connected_without(NodeId v) {
    if (mode_ == PeelConnectivity::full_search) return reach_all();
    if (!in_tree_[v]) return true;
    return rebuild_tree();
  }

  std::size_t searches() const noexcept { return searches_; }

 private:
  // Search over surviving nodes from the first seed, stopping once every seed
  // is reached.
  bool reach_all() {
    ++searches_;
    const std::uint32_t epoch = ++epoch_;
    std::size_t found = 1;
    stack_.assign(1, q_[0]);
    stamp_[q_[0]] = epoch;
    while (!stack_.empty() && found < q_.size()) {
      NodeId u = stack_.back();
      stack_.pop_back();
      for (NodeId v : g_.neighbors(u)) {
        if (stamp_[v] == epoch || !alive_[v]) continue;
        stamp_[v] = epoch;
        stack_.push_back(v);
        if (is_seed_[v]) ++found;
      }
    }
    return found == q_.size();
  }

  bool rebuild_tree() {
    ++searches_;
    auto nodes = seed_connector(g_, w_, q_, tree_length_, alive_);
    if (!nodes) return false;
    for (NodeId v : tree_nodes_) in_tree_[v] = 0;
    tree_nodes_ = std::move(*nodes);
    for (NodeId v : tree_nodes_) in_tree_[v] = 1;
    return true;
  }

  const Graph& g_;
  const EdgeWeights& w_;
  const NodeSet& q_;
  const std::vector<char>& alive_;
  PeelConnectivity mode_;
  PathLength tree_length_;
  std::vector<char> is_seed_;
  std::vector<char> in_tree_;
  std::vector<NodeId> tree_nodes_;
  std::vector<std::uint32_t> stamp_;
  std::vector<NodeId> stack_;
  std::uint32_t epoch_ = 0;
  std::size_t searches_ = 0;
};

}  // namespace detail

struct PeelStats {
  std::size_t picks = 0;
  std::size_t connectivity_searches = 0;
};

/// Node set returned by QPeel for seeds `q`.
///
/// Seeds are never candidates for removal. Score ties go to the lowest node
/// id. For the random score, one U[0,1) value per node is drawn up front from
/// a generator seeded with `rng_seed`.
inline NodeSet qpeel_search(const Graph& g, const EdgeWeights& w, const NodeSet& q,
                            PeelScore score_kind, std::uint64_t rng_seed = 0,
                            PeelConnectivity check = PeelConnectivity::maintained_tree,
                            PeelStats* stats = nullptr) {
  detail::require_seeds(g, q);
  const std::size_t n = g.node_count();

  std::vector<char> alive(n, 1);     // V' and K together
  std::vector<char> candidate(n, 1);  // K
  std::vector<char> kept(n, 0);       // V'
  for (NodeId s : q) {
    candidate[s] = 0;
    kept[s] = 1;
  }
  std::vector<std::uint32_t> live_degree(n);
  for (NodeId i = 0; i < n; ++i) live_degree[i] = static_cast<std::uint32_t>(g.degree(i));

  detail::SeedConnectivity connectivity(
      g, w, q, alive, check,
      score_kind == PeelScore::random ? PathLength::hops : PathLength::weight_sum);

  std::vector<double> score(n, 0.0);
  auto rescore = [&](NodeId i) {
    double s = 0.0;
    auto nb = g.neighbors(i);
    const std::size_t base = g.slot_begin(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (!alive[nb[k]]) continue;
      double wk = w.at_slot(base + k);
      s = score_kind == PeelScore::weight_sum ? s + wk : std::max(s, wk);
    }
    score[i] = s;
  };
  if (score_kind == PeelScore::random) {
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (NodeId i = 0; i < n; ++i) score[i] = unit(rng);
  } else {
    for (NodeId i = 0; i < n; ++i) rescore(i);
  }

  struct Entry {
    double score;
    NodeId node;
    bool operator<(const Entry& o) const {
      return score < o.score || (score == o.score && node > o.node);
    }
  };
  std::priority_queue<Entry> heap;
  for (NodeId i = 0; i < n; ++i)
    if (candidate[i]) heap.push({score[i], i});

  auto drop = [&](NodeId v) {
    alive[v] = 0;
    candidate[v] = 0;
    for (NodeId j : g.neighbors(v)) {
      if (!alive[j]) continue;
      --live_degree[j];
      if (candidate[j] && score_kind != PeelScore::random) {
        rescore(j);
        heap.push({score[j], j});
      }
    }
  };
  auto prune_if_isolated = [&](NodeId j) {
    if (candidate[j] && live_degree[j] == 0) {
      alive[j] = 0;
      candidate[j] = 0;
    }
  };

  bool trimmed_once = false;
  std::size_t picks = 0;
  while (!heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    NodeId v = top.node;
    if (!candidate[v] || top.score != score[v]) continue;
    ++picks;
    alive[v] = 0;
    bool still_connected = connectivity.connected_without(v);
    alive[v] = 1;
    if (!still_connected) {
      candidate[v] = 0;
      kept[v] = 1;
      continue;
    }
    drop(v);
    if (!trimmed_once) {
      trimmed_once = true;
      for (NodeId j = 0; j < n; ++j) prune_if_isolated(j);
    } else {
      for (NodeId j : g.neighbors(v)) prune_if_isolated(j);
    }
  }
  if (stats) {
    stats->picks = picks;
    stats->connectivity_searches = connectivity.searches();
  }

  std::vector<NodeId> out;
  for (NodeId i = 0; i < n; ++i)
    if (kept[i]) out.push_back(i);
  return NodeSet(std::move(out));
}

/// Conforms profiles on G(nodes) and scores the result. Every solver's
/// output is scored here.
inline Solution evaluate_solution(const Graph& g, const ProfileMatrix& latent, const NodeSet& nodes,
                                  const ConformOptions& opts = {}) {
  require_rows(g, latent, "latent profile matrix");
  require_within(g, nodes, "solution");
  if (!is_connected_set(g, nodes)) fail(ErrorKind::infeasible, "disconnected node set");
  Subgraph sub = induced_subgraph(g, nodes);
  ProfileMatrix local = latent.select_rows(sub.to_original);
  auto conformed = conform(sub.graph, local, opts);
  Solution s;
  s.nodes = nodes;
  s.edges_induced = sub.graph.edge_count();
  s.tension = social_tension(sub.graph, local, conformed.conformed);
  s.conformed = std::move(conformed.conformed);
  return s;
}

/// A configured community-search algorithm.
struct CommunitySolver {
  Algorithm algorithm = Algorithm::qtree_hops;
  std::uint64_t rng_seed = 0;  // used by the random peel score only
  PeelConnectivity peel_check = PeelConnectivity::maintained_tree;

  NodeSet search(const Graph& g, const EdgeWeights& w, const NodeSet& q) const {
    switch (algorithm) {
      case Algorithm::qtree_hops: return qtree_search(g, w, q, PathLength::hops);
      case Algorithm::qtree_weight: return qtree_search(g, w, q, PathLength::weight_sum);
      case Algorithm::qpeel_random: return qpeel_search(g, w, q, PeelScore::random, rng_seed, peel_check);
      case Algorithm::qpeel_sum: return qpeel_search(g, w, q, PeelScore::weight_sum, rng_seed, peel_check);
      case Algorithm::qpeel_max: return qpeel_search(g, w, q, PeelScore::weight_max, rng_seed, peel_check);
    }
    fail(ErrorKind::input, "unknown algorithm");
  }

  Solution solve(const Graph& g, const ProfileMatrix& latent, const EdgeWeights& w,
                 const NodeSet& q, const ConformOptions& opts = {}) const {
    Solution s = evaluate_solution(g, latent, search(g, w, q), opts);
    s.algorithm_tag = std::string(algorithm_tag(algorithm));
    return s;
  }
};

inline Solution qtree(const Graph& g, const ProfileMatrix& latent, const NodeSet& q,
                      PathLength variant, WeightNorm norm = WeightNorm::l2,
                      const ConformOptions& opts = {}) {
  CommunitySolver solver{variant == PathLength::hops ? Algorithm::qtree_hops
                                                     : Algorithm::qtree_weight};
  return solver.solve(g, latent, proxy_weights(g, latent, norm), q, opts);
}

inline Solution qpeel(const Graph& g, const ProfileMatrix& latent, const NodeSet& q,
                      PeelScore variant, std::uint64_t rng_seed,
                      WeightNorm norm = WeightNorm::l2, const ConformOptions& opts = {}) {
  Algorithm a = variant == PeelScore::random       ? Algorithm::qpeel_random
                : variant == PeelScore::weight_sum ? Algorithm::qpeel_sum
                                                   : Algorithm::qpeel_max;
  CommunitySolver solver{a, rng_seed};
  return solver.solve(g, latent, proxy_weights(g, latent, norm), q, opts);
}

}  // namespace tension
