#pragma once

// Team formation on top of the community solvers.
//
// Skill cover is reduced to community search on an extended graph holding
// one extra node per skill, linked to everyone who has that skill. Searching
// with the required skill nodes as seeds yields people covering the project;
// a second search on the original graph, seeded with those people, makes the
// team connected without the skill nodes. The cardinality variant grows a
// connected set greedily instead.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "tension/community_search.hpp"
#include "tension/conformation.hpp"
#include "tension/error.hpp"
#include "tension/graph.hpp"
#include "tension/profiles.hpp"

namespace tension {

using SkillId = std::uint32_t;

class SkillMap {
 public:
  SkillMap() = default;
  SkillMap(std::vector<std::string> universe, std::size_t node_count)
      : universe_(std::move(universe)), per_node_(node_count) {
    for (SkillId s = 0; s < universe_.size(); ++s) index_.emplace(universe_[s], s);
  }

  void grant(NodeId i, SkillId s) {
    if (i >= per_node_.size()) fail(ErrorKind::input, "skill holder " + std::to_string(i) + " outside the graph");
    if (s >= universe_.size()) fail(ErrorKind::input, "unknown skill index " + std::to_string(s));
    auto& skills = per_node_[i];
    auto it = std::lower_bound(skills.begin(), skills.end(), s);
    if (it == skills.end() || *it != s) skills.insert(it, s);
  }

  std::size_t skill_count() const noexcept { return universe_.size(); }
  std::size_t node_count() const noexcept { return per_node_.size(); }
  const std::string& label(SkillId s) const { return universe_[s]; }
  const std::vector<std::string>& universe() const noexcept { return universe_; }
  const std::vector<SkillId>& skills_of(NodeId i) const { return per_node_[i]; }
  bool has(NodeId i, SkillId s) const {
    return std::binary_search(per_node_[i].begin(), per_node_[i].end(), s);
  }

  std::optional<SkillId> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Holders of skill `s`, ascending.
  std::vector<NodeId> holders(SkillId s) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < per_node_.size(); ++i)
      if (has(i, s)) out.push_back(i);
    return out;
  }

 private:
  std::vector<std::string> universe_;
  std::unordered_map<std::string, SkillId> index_;
  std::vector<std::vector<SkillId>> per_node_;
};

struct Project {
  std::vector<SkillId> required;  // sorted, duplicate-free

  Project() = default;
  explicit Project(std::vector<SkillId> skills) : required(std::move(skills)) {
    std::sort(required.begin(), required.end());
    required.erase(std::unique(required.begin(), required.end()), required.end());
  }
};

struct ExtendedGraph {
  Graph graph;              // original nodes keep their ids; skill s is node base + s
  NodeId skill_base = 0;    // = original node count
  ProfileMatrix latent;     // skill rows hold the mean profile of their holders
  EdgeWeights weights;      // proxy weights; zero on every skill edge

  NodeId skill_node(SkillId s) const { return skill_base + s; }
  bool is_skill_node(NodeId v) const { return v >= skill_base; }
};

inline void validate_project(const SkillMap& skills, const Project& p) {
  if (p.required.empty()) fail(ErrorKind::input, "project requires no skills");
  for (SkillId s : p.required)
    if (s >= skills.skill_count()) fail(ErrorKind::input, "project skill index out of range");
}

/// The graph plus one node per skill of the universe, each linked to the
/// holders of that skill.
inline ExtendedGraph extended_graph(const Graph& g, const SkillMap& skills, const Project& p,
                                    const ProfileMatrix& latent,
                                    WeightNorm norm = WeightNorm::l2) {
  require_rows(g, latent, "latent profile matrix");
  if (skills.node_count() != g.node_count())
    fail(ErrorKind::input, "skill map and graph disagree on node count");
  validate_project(skills, p);

  const std::size_t n = g.node_count();
  const std::size_t m = latent.cols();
  std::vector<std::vector<NodeId>> holders(skills.skill_count());
  for (NodeId i = 0; i < n; ++i)
    for (SkillId s : skills.skills_of(i)) holders[s].push_back(i);
  for (SkillId s : p.required)
    if (holders[s].empty()) fail(ErrorKind::infeasible, "uncoverable skill " + skills.label(s));

  std::vector<std::pair<NodeId, NodeId>> edges = g.edges();
  ExtendedGraph ext;
  ext.skill_base = static_cast<NodeId>(n);
  ext.latent = ProfileMatrix(n + skills.skill_count(), m);
  for (NodeId i = 0; i < n; ++i)
    for (std::size_t a = 0; a < m; ++a) ext.latent(i, a) = latent(i, a);
  for (SkillId s = 0; s < skills.skill_count(); ++s) {
    NodeId node = ext.skill_node(s);
    for (NodeId h : holders[s]) {
      edges.emplace_back(h, node);
      for (std::size_t a = 0; a < m; ++a) ext.latent(node, a) += latent(h, a);
    }
    if (!holders[s].empty())
      for (std::size_t a = 0; a < m; ++a)
        ext.latent(node, a) /= static_cast<double>(holders[s].size());
  }
  ext.graph = Graph(n + skills.skill_count(), edges);
  EdgeWeights base = proxy_weights(ext.graph, ext.latent, norm);
  ext.weights = EdgeWeights::from_function(ext.graph, [&](NodeId i, NodeId j) {
    return ext.is_skill_node(i) || ext.is_skill_node(j) ? 0.0 : base(ext.graph, i, j);
  });
  return ext;
}

struct TeamResult {
  Solution solution;
  NodeSet first_pass;       // individuals selected on the extended graph
  bool second_pass_noop = false;
};

/// Two-pass team formation with `solver` as the community-search subroutine.
inline TeamResult tteam(const Graph& g, const ProfileMatrix& latent, const SkillMap& skills,
                        const Project& p, const CommunitySolver& solver,
                        WeightNorm norm = WeightNorm::l2, const ConformOptions& opts = {}) {
  ExtendedGraph ext = extended_graph(g, skills, p, latent, norm);

  std::vector<NodeId> skill_seeds;
  for (SkillId s : p.required) skill_seeds.push_back(ext.skill_node(s));
  NodeSet found = solver.search(ext.graph, ext.weights, NodeSet(skill_seeds));

  std::vector<NodeId> people;
  for (NodeId v : found)
    if (!ext.is_skill_node(v)) people.push_back(v);
  // A lone required skill comes back as just its skill node; its holder with
  // the smallest id stands in.
  for (SkillId s : p.required) {
    bool covered = std::any_of(people.begin(), people.end(),
                               [&](NodeId i) { return skills.has(i, s); });
    if (!covered) people.push_back(skills.holders(s).front());
  }
  NodeSet first(std::move(people));

  EdgeWeights w = proxy_weights(g, latent, norm);
  NodeSet second = solver.search(g, w, first);

  TeamResult r;
  r.second_pass_noop = second == first;
  r.first_pass = std::move(first);
  r.solution = evaluate_solution(g, latent, second, opts);
  r.solution.algorithm_tag = std::string(algorithm_tag(solver.algorithm));
  return r;
}

/// True iff the union of the skills of `team` contains every required skill.
inline bool covers(const SkillMap& skills, const Project& p, const NodeSet& team) {
  return std::all_of(p.required.begin(), p.required.end(), [&](SkillId s) {
    return std::any_of(team.begin(), team.end(), [&](NodeId i) { return skills.has(i, s); });
  });
}

struct CardinalityOptions {
  std::size_t exhaustive_limit = 500;  // try every start up to this many nodes
  std::size_t sampled_starts = 32;
  std::uint64_t rng_seed = 0;
  WeightNorm norm = WeightNorm::l2;
  ConformOptions conform;
};

/// Greedy fixed-size community: from each start, repeatedly add the frontier
/// node with the smallest sum of squared proxy weights to the current set
/// (ties to the lowest id); the grown set with the lowest conformed tension
/// wins, ties going to the earliest start.
inline Solution greedy_cardinality(const Graph& g, const ProfileMatrix& latent, std::size_t k,
                                   const CardinalityOptions& opts = {}) {
  require_rows(g, latent, "latent profile matrix");
  const std::size_t n = g.node_count();
  if (k == 0 || k > n) fail(ErrorKind::input, "cardinality must lie in 1..n");

  std::uint32_t component_count = 0;
  auto label = component_labels(g, &component_count);
  std::vector<std::size_t> component_size(component_count, 0);
  for (auto l : label) ++component_size[l];
  std::vector<NodeId> eligible;
  for (NodeId i = 0; i < n; ++i)
    if (component_size[label[i]] >= k) eligible.push_back(i);
  if (eligible.empty())
    fail(ErrorKind::infeasible, "k exceeds the size of the largest component");

  std::vector<NodeId> starts = eligible;
  if (n > opts.exhaustive_limit && eligible.size() > opts.sampled_starts) {
    std::mt19937_64 rng(opts.rng_seed);
    starts.clear();
    std::sample(eligible.begin(), eligible.end(), std::back_inserter(starts),
                static_cast<std::ptrdiff_t>(opts.sampled_starts), rng);
  }

  EdgeWeights w = proxy_weights(g, latent, opts.norm);
  std::vector<char> in_set(n, 0);
  std::vector<double> added_cost(n, 0.0);  // sum of w^2 to current members
  std::vector<char> on_frontier(n, 0);

  std::optional<Solution> best;
  for (NodeId start : starts) {
    std::vector<NodeId> members{start};
    std::vector<NodeId> frontier;
    in_set[start] = 1;
    auto absorb = [&](NodeId u) {
      auto nb = g.neighbors(u);
      for (std::size_t s = 0; s < nb.size(); ++s) {
        NodeId v = nb[s];
        if (in_set[v]) continue;
        double wv = w.at_slot(g.slot_begin(u) + s);
        added_cost[v] += wv * wv;
        if (!on_frontier[v]) {
          on_frontier[v] = 1;
          frontier.push_back(v);
        }
      }
    };
    absorb(start);
    while (members.size() < k) {
      auto pick = std::min_element(frontier.begin(), frontier.end(), [&](NodeId a, NodeId b) {
        return added_cost[a] < added_cost[b] || (added_cost[a] == added_cost[b] && a < b);
      });
      NodeId u = *pick;
      *pick = frontier.back();
      frontier.pop_back();
      on_frontier[u] = 0;
      added_cost[u] = 0.0;
      in_set[u] = 1;
      members.push_back(u);
      absorb(u);
    }
    for (NodeId v : members) in_set[v] = 0;
    for (NodeId v : frontier) {
      on_frontier[v] = 0;
      added_cost[v] = 0.0;
    }
    Solution s = evaluate_solution(g, latent, NodeSet(members), opts.conform);
    if (!best || s.tension < best->tension) best = std::move(s);
  }
  best->algorithm_tag = "Greedy";
  return *best;
}

}  // namespace tension
