#pragma once

// Random graph and incidence generators used by tests, benchmarks and the
// experiment harness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "tension/evaluation.hpp"
#include "tension/graph.hpp"

namespace tension {

/// G(n, p) by independent coin flips over all pairs.
inline Graph erdos_renyi(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (coin(rng)) edges.emplace_back(i, j);
  return Graph(n, edges);
}

struct PlantedConfig {
  std::size_t nodes = 2000;
  std::size_t communities = 20;
  double in_degree = 6.0;   // expected neighbors inside the own community
  double out_degree = 1.5;  // expected neighbors elsewhere
  double degree_exponent = 2.5;  // Pareto tail of node propensities; 0 = uniform
};

struct PlantedGraph {
  Graph graph;
  std::vector<std::uint32_t> community;  // node -> community, round-robin
};

/// Planted-partition graph with heterogeneous degrees. Every node draws a
/// Pareto propensity; edge endpoints are sampled proportionally to it, inside
/// communities and across the whole graph, in the expected numbers given by
/// the mean degrees. A ring through all nodes keeps the graph connected.
inline PlantedGraph planted_partition(const PlantedConfig& cfg, std::mt19937_64& rng) {
  const std::size_t n = cfg.nodes;
  const std::size_t c = std::max<std::size_t>(1, cfg.communities);
  PlantedGraph out;
  out.community.resize(n);
  std::vector<std::vector<NodeId>> members(c);
  for (NodeId i = 0; i < n; ++i) {
    out.community[i] = static_cast<std::uint32_t>(i % c);
    members[i % c].push_back(i);
  }
  std::vector<double> propensity(n, 1.0);
  if (cfg.degree_exponent > 1.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double cap = std::sqrt(static_cast<double>(n));
    for (auto& p : propensity)
      p = std::min(cap, std::pow(1.0 - unit(rng), -1.0 / (cfg.degree_exponent - 1.0)));
  }
  auto weighted_picker = [&](const std::vector<NodeId>& pool) {
    std::vector<double> wts;
    wts.reserve(pool.size());
    for (NodeId i : pool) wts.push_back(propensity[i]);
    return std::discrete_distribution<std::size_t>(wts.begin(), wts.end());
  };

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  if (n > 2) edges.emplace_back(static_cast<NodeId>(n - 1), 0);
  for (const auto& group : members) {
    if (group.size() < 2) continue;
    auto pairs = static_cast<std::size_t>(cfg.in_degree * static_cast<double>(group.size()) / 2.0);
    auto pick = weighted_picker(group);
    for (std::size_t e = 0; e < pairs; ++e) {
      NodeId a = group[pick(rng)], b = group[pick(rng)];
      if (a != b) edges.emplace_back(a, b);
    }
  }
  if (n >= 2) {
    std::vector<NodeId> everyone(n);
    std::iota(everyone.begin(), everyone.end(), NodeId{0});
    auto pairs = static_cast<std::size_t>(cfg.out_degree * static_cast<double>(n) / 2.0);
    auto pick = weighted_picker(everyone);
    for (std::size_t e = 0; e < pairs; ++e) {
      NodeId a = static_cast<NodeId>(pick(rng)), b = static_cast<NodeId>(pick(rng));
      if (a != b) edges.emplace_back(a, b);
    }
  }
  out.graph = Graph(n, edges);
  return out;
}

struct TopicConfig {
  std::size_t features_per_community = 8;
  std::size_t draws_per_node = 12;
  double on_topic = 0.8;  // chance a draw comes from the node's own community
};

/// Node x keyword counts where each community favors its own keyword pool.
inline Incidence topic_incidence(const std::vector<std::uint32_t>& community,
                                 std::size_t communities, const TopicConfig& cfg,
                                 std::mt19937_64& rng) {
  Incidence inc;
  inc.nodes = community.size();
  inc.features = communities * cfg.features_per_community;
  std::bernoulli_distribution on_topic(cfg.on_topic);
  std::uniform_int_distribution<std::size_t> local(0, cfg.features_per_community - 1);
  std::uniform_int_distribution<std::size_t> any(0, inc.features - 1);
  for (NodeId i = 0; i < inc.nodes; ++i)
    for (std::size_t d = 0; d < cfg.draws_per_node; ++d) {
      std::size_t f = on_topic(rng) ? community[i] * cfg.features_per_community + local(rng)
                                    : any(rng);
      inc.entries.push_back({i, static_cast<std::uint32_t>(f), 1.0});
    }
  return inc;
}

}  // namespace tension
