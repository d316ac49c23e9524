#pragma once

// Subcommands behind the command-line tool. Each takes a resolved RunConfig,
// writes its product to `out` and diagnostics to `log`, and returns an exit
// code.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tension/community_search.hpp"
#include "tension/conformation.hpp"
#include "tension/error.hpp"
#include "tension/evaluation.hpp"
#include "tension/graph.hpp"
#include "tension/io.hpp"
#include "tension/random.hpp"
#include "tension/synthetic.hpp"
#include "tension/team_formation.hpp"

namespace tension {

struct RunConfig {
  std::vector<std::string> graphs;  // bench accepts several
  std::string profiles;
  std::string incidence;
  std::string seeds;
  std::string skills;
  std::string project;
  std::string out;

  // Profile generator, used when no profile file is given.
  std::string scheme = "uniform";  // uniform | exponential | thresholded | eigenvector
  std::size_t dims = 1;
  double lambda = 6.0;
  double alpha = 0.6;
  std::size_t nodes = 0;  // gen-profiles without a graph; bench synthetic sizes below

  // Seed sampler, used when no seed file is given.
  SeedSampling sampling{7, 1000, 30};

  // Project sampler, used when no project file is given.
  std::size_t projects = 80;
  std::size_t min_skills = 3;
  std::size_t max_skills = 13;

  std::vector<Algorithm> algorithms;  // empty means all five
  std::uint64_t rng_seed = 0;
  ConformOptions conform;
  WeightNorm norm = WeightNorm::l2;
  double skill_threshold = 4.0;
  std::size_t k = 0;                 // cardinality
  bool timing = false;               // fill the seconds column
  std::vector<std::size_t> bench_sizes;
  std::size_t bench_runs = 30;

  std::vector<Algorithm> algorithm_list() const {
    if (!algorithms.empty()) return algorithms;
    return {std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
  }
};

inline std::optional<WeightNorm> parse_norm(std::string_view s) {
  if (s == "l2") return WeightNorm::l2;
  if (s == "l1") return WeightNorm::l1;
  if (s == "max") return WeightNorm::max;
  return std::nullopt;
}

/// Family and variant letter, e.g. ("QPeel", "m").
inline std::pair<std::string, std::string> algorithm_columns(Algorithm a) {
  std::string tag(algorithm_tag(a));
  return {tag.substr(0, tag.find('(')), tag.substr(tag.find('(') + 1, 1)};
}

/// Graph and profiles after restriction to the largest component. Node ids
/// in inputs and outputs stay in the original numbering.
struct Workspace {
  Graph graph;
  ProfileMatrix latent;
  std::vector<NodeId> to_original;
  std::vector<NodeId> to_local;  // kDropped for nodes outside the component

  static constexpr NodeId kDropped = static_cast<NodeId>(-1);

  std::optional<NodeSet> localize(const NodeSet& original) const {
    std::vector<NodeId> out;
    for (NodeId v : original) {
      if (v >= to_local.size() || to_local[v] == kDropped) return std::nullopt;
      out.push_back(to_local[v]);
    }
    return NodeSet(std::move(out));
  }
};

namespace detail {

inline Graph load_graph(const std::string& path, std::size_t min_nodes, std::ostream& log) {
  if (path.empty()) fail(ErrorKind::input, "no graph given (--graph)");
  auto in = io::open_input(path);
  io::EdgeList list = io::read_edge_list(in, path);
  for (const auto& w : list.warnings) log << "warning: " << w << '\n';
  return Graph(std::max(list.node_count, min_nodes), list.edges);
}

inline ProfileMatrix load_or_generate_profiles(const RunConfig& cfg, std::size_t n) {
  if (!cfg.profiles.empty()) {
    auto in = io::open_input(cfg.profiles);
    return io::read_profiles(in, cfg.profiles);
  }
  if (cfg.scheme == "eigenvector") {
    if (cfg.incidence.empty()) fail(ErrorKind::input, "eigenvector profiles need --incidence");
    auto in = io::open_input(cfg.incidence);
    return eigenvector_profiles(io::read_incidence(in, n, cfg.incidence), cfg.dims);
  }
  ProfileScheme scheme;
  scheme.lambda = cfg.lambda;
  scheme.alpha = cfg.alpha;
  if (cfg.scheme == "uniform") scheme.kind = ProfileScheme::Kind::uniform;
  else if (cfg.scheme == "exponential") scheme.kind = ProfileScheme::Kind::exponential;
  else if (cfg.scheme == "thresholded") scheme.kind = ProfileScheme::Kind::thresholded;
  else fail(ErrorKind::input, "unknown profile scheme '" + cfg.scheme + "'");
  auto rng = make_stream(cfg.rng_seed, "profiles");
  return generate_profiles(n, cfg.dims, scheme, rng);
}

inline Workspace restrict_to_largest_component(Graph g, ProfileMatrix latent, std::ostream& log) {
  Workspace ws;
  const std::size_t n = g.node_count();
  ws.to_local.assign(n, Workspace::kDropped);
  std::uint32_t components = 0;
  component_labels(g, &components);
  if (components <= 1) {
    for (NodeId i = 0; i < n; ++i) {
      ws.to_original.push_back(i);
      ws.to_local[i] = i;
    }
    ws.graph = std::move(g);
    ws.latent = std::move(latent);
    return ws;
  }
  NodeSet keep = largest_component(g);
  log << "warning: graph has " << components << " components; keeping the largest ("
      << keep.size() << " of " << n << " nodes)\n";
  Subgraph sub = induced_subgraph(g, keep);
  ws.graph = std::move(sub.graph);
  ws.to_original = std::move(sub.to_original);
  for (NodeId k = 0; k < ws.to_original.size(); ++k) ws.to_local[ws.to_original[k]] = k;
  ws.latent = latent.select_rows(ws.to_original);
  return ws;
}

inline Workspace load_workspace(const RunConfig& cfg, std::ostream& log) {
  if (cfg.graphs.size() > 1) fail(ErrorKind::input, "expected a single --graph");
  ProfileMatrix latent;
  std::size_t rows = 0;
  if (!cfg.profiles.empty()) {
    latent = load_or_generate_profiles(cfg, 0);
    rows = latent.rows();
  }
  Graph g = load_graph(cfg.graphs.empty() ? std::string() : cfg.graphs.front(), rows, log);
  if (cfg.profiles.empty()) latent = load_or_generate_profiles(cfg, g.node_count());
  require_rows(g, latent, "latent profile matrix");
  return restrict_to_largest_component(std::move(g), std::move(latent), log);
}

inline void write_metrics(std::ostream& out, const std::vector<io::MetricsRow>& rows) {
  out << io::kMetricsHeader << '\n';
  for (const auto& r : rows) io::write_metrics_row(out, r);
}

inline int report(const Error& e, std::ostream& log) {
  log << "error: " << e.what() << '\n';
  return e.exit_code();
}

template <class F>
double seconds_of(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Conformed profiles of every node, then a "# tension" line.
inline int cmd_conform(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    ProfileMatrix latent;
    if (cfg.profiles.empty()) fail(ErrorKind::input, "no profiles given (--profiles)");
    latent = detail::load_or_generate_profiles(cfg, 0);
    Graph g = detail::load_graph(cfg.graphs.empty() ? std::string() : cfg.graphs.front(),
                                 latent.rows(), log);
    require_rows(g, latent, "latent profile matrix");
    auto r = conform(g, latent, cfg.conform);
    io::write_profiles(out, r.conformed);
    out << "# tension " << io::format_real(social_tension(g, latent, r.conformed)) << '\n';
    log << "converged after " << r.iterations << " iterations\n";
    return 0;
  } catch (const Error& e) {
    return detail::report(e, log);
  }
}

/// One metrics row per (seed set, algorithm). Failed runs get a row with
/// status "failed" and the reason; the batch goes on.
inline int cmd_comm(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    Workspace ws = detail::load_workspace(cfg, log);
    MetricContext ctx(ws.graph, ws.latent, cfg.norm);

    std::vector<io::SeedEntry> entries;
    std::vector<std::optional<NodeSet>> local;
    if (!cfg.seeds.empty()) {
      auto in = io::open_input(cfg.seeds);
      entries = io::read_seed_sets(in, cfg.seeds);
      for (const auto& e : entries) local.push_back(ws.localize(e.seeds));
    } else {
      auto rng = make_stream(cfg.rng_seed, "seeds");
      for (const SeedGroup& grp : sample_seed_groups(ws.graph, cfg.sampling, rng))
        for (const NodeSet& s : grp.sets) {
          entries.push_back({grp.label, s});
          local.push_back(s);
        }
    }

    std::vector<io::MetricsRow> rows;
    for (std::size_t idx = 0; idx < entries.size(); ++idx) {
      for (Algorithm a : cfg.algorithm_list()) {
        io::MetricsRow row;
        row.run_id = std::to_string(idx);
        std::tie(row.algorithm, row.variant) = algorithm_columns(a);
        row.group = entries[idx].group;
        try {
          if (!local[idx]) fail(ErrorKind::infeasible, "disconnected seeds");
          const NodeSet& q = *local[idx];
          detail::require_seeds(ws.graph, q);
          CommunitySolver solver{a, stream_seed(cfg.rng_seed, "qpeel-r/" + row.run_id)};
          NodeSet found;
          double secs = detail::seconds_of([&] { found = solver.search(ws.graph, ctx.weights(), q); });
          Solution s = evaluate_solution(ws.graph, ws.latent, found, cfg.conform);
          row.set(ctx.measure(s, q), s);
          if (cfg.timing) row.seconds = secs;
        } catch (const Error& e) {
          row.status = "failed";
          row.note = e.what();
        }
        rows.push_back(std::move(row));
      }
    }
    detail::write_metrics(out, rows);
    return 0;
  } catch (const Error& e) {
    return detail::report(e, log);
  }
}

/// Uniformly sized random projects over the skills some node holds.
inline std::vector<std::vector<std::string>> sample_projects(const SkillMap& skills,
                                                             const RunConfig& cfg) {
  std::vector<std::string> coverable;
  for (SkillId s = 0; s < skills.skill_count(); ++s)
    if (!skills.holders(s).empty()) coverable.push_back(skills.label(s));
  if (coverable.empty()) fail(ErrorKind::infeasible, "no skill is held by any node");
  if (cfg.min_skills == 0 || cfg.min_skills > cfg.max_skills)
    fail(ErrorKind::input, "invalid project size range");
  auto rng = make_stream(cfg.rng_seed, "projects");
  std::uniform_int_distribution<std::size_t> size(cfg.min_skills, cfg.max_skills);
  std::vector<std::vector<std::string>> out;
  for (std::size_t p = 0; p < cfg.projects; ++p) {
    std::size_t want = std::min(size(rng), coverable.size());
    std::vector<std::string> pick;
    std::sample(coverable.begin(), coverable.end(), std::back_inserter(pick),
                static_cast<std::ptrdiff_t>(want), rng);
    out.push_back(std::move(pick));
  }
  return out;
}

/// One metrics row per (project, algorithm). The seed set for the metrics is
/// the set of individuals picked by the first pass; the note records a
/// second pass that changed nothing.
inline int cmd_team(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    if (cfg.skills.empty()) fail(ErrorKind::input, "no skills given (--skills)");
    Workspace ws = detail::load_workspace(cfg, log);
    MetricContext ctx(ws.graph, ws.latent, cfg.norm);

    auto skills_in = io::open_input(cfg.skills);
    SkillMap original = io::read_skills(skills_in, ws.to_local.size(), cfg.skill_threshold, cfg.skills);
    SkillMap skills(original.universe(), ws.graph.node_count());
    for (NodeId k = 0; k < ws.to_original.size(); ++k)
      for (SkillId s : original.skills_of(ws.to_original[k])) skills.grant(k, s);

    std::vector<std::vector<std::string>> projects;
    if (!cfg.project.empty()) {
      auto in = io::open_input(cfg.project);
      projects = io::read_projects(in, cfg.project);
    } else {
      projects = sample_projects(skills, cfg);
    }

    std::vector<io::MetricsRow> rows;
    for (std::size_t idx = 0; idx < projects.size(); ++idx) {
      for (Algorithm a : cfg.algorithm_list()) {
        io::MetricsRow row;
        row.run_id = std::to_string(idx);
        std::tie(row.algorithm, row.variant) = algorithm_columns(a);
        row.group = std::to_string(projects[idx].size());
        try {
          std::vector<SkillId> ids;
          for (const auto& label : projects[idx]) {
            auto s = skills.find(label);
            if (!s) fail(ErrorKind::infeasible, "uncoverable skill " + label);
            ids.push_back(*s);
          }
          Project p(std::move(ids));
          CommunitySolver solver{a, stream_seed(cfg.rng_seed, "qpeel-r/team/" + row.run_id)};
          TeamResult r;
          double secs = detail::seconds_of(
              [&] { r = tteam(ws.graph, ws.latent, skills, p, solver, cfg.norm, cfg.conform); });
          row.set(ctx.measure(r.solution, r.first_pass), r.solution);
          if (cfg.timing) row.seconds = secs;
          if (r.second_pass_noop) row.note = "second pass unchanged";
        } catch (const Error& e) {
          row.status = "failed";
          row.note = e.what();
        }
        rows.push_back(std::move(row));
      }
    }
    detail::write_metrics(out, rows);
    return 0;
  } catch (const Error& e) {
    return detail::report(e, log);
  }
}

/// Greedy community of exactly k nodes. Without seeds there is no tree
/// baseline, so tau and mpe are NA.
inline int cmd_cardinality(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    Workspace ws = detail::load_workspace(cfg, log);
    if (cfg.k > ws.graph.node_count() && cfg.k <= ws.to_local.size())
      fail(ErrorKind::infeasible, "k exceeds the size of the largest component");
    MetricContext ctx(ws.graph, ws.latent, cfg.norm);
    CardinalityOptions opts;
    opts.rng_seed = stream_seed(cfg.rng_seed, "cardinality-starts");
    opts.norm = cfg.norm;
    opts.conform = cfg.conform;
    Solution s;
    double secs = detail::seconds_of([&] { s = greedy_cardinality(ws.graph, ws.latent, cfg.k, opts); });
    io::MetricsRow row;
    row.run_id = "0";
    row.algorithm = "Greedy";
    row.variant = "k=" + std::to_string(cfg.k);
    row.raw_tension = s.tension;
    row.nodes = s.nodes.size();
    row.edges = s.edges_induced;
    row.mpc = s.edges_induced ? avg_sq_weight(ws.graph, ctx.weights(), s.nodes) / ctx.graph_avg_sq_weight()
                              : 0.0;
    if (cfg.timing) row.seconds = secs;
    std::string members;
    for (NodeId v : s.nodes) members += (members.empty() ? "" : " ") + std::to_string(ws.to_original[v]);
    row.note = members;
    detail::write_metrics(out, {row});
    return 0;
  } catch (const Error& e) {
    return detail::report(e, log);
  }
}

inline int cmd_gen_profiles(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    std::size_t n = cfg.nodes;
    if (!cfg.graphs.empty()) n = detail::load_graph(cfg.graphs.front(), 0, log).node_count();
    if (n == 0) fail(ErrorKind::input, "need --graph or --nodes");
    RunConfig gen = cfg;
    gen.profiles.clear();
    io::write_profiles(out, detail::load_or_generate_profiles(gen, n));
    return 0;
  } catch (const Error& e) {
    return detail::report(e, log);
  }
}

/// D1-D3 seed groups in original node ids.
inline int cmd_sample_seeds(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    Graph g = detail::load_graph(cfg.graphs.empty() ? std::string() : cfg.graphs.front(), 0, log);
    Workspace ws = detail::restrict_to_largest_component(
        std::move(g), ProfileMatrix(0, 0), log);
    auto rng = make_stream(cfg.rng_seed, "seeds");
    auto groups = sample_seed_groups(ws.graph, cfg.sampling, rng);
    for (auto& grp : groups)
      for (auto& s : grp.sets) {
        std::vector<NodeId> ids;
        for (NodeId v : s) ids.push_back(ws.to_original[v]);
        s = NodeSet(std::move(ids));
      }
    io::write_seed_groups(out, groups);
    return 0;
  } catch (const Error& e) {
    return detail::report(e, log);
  }
}

struct Timing {
  Algorithm algorithm;
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Search time of every algorithm over the same seed sets.
inline std::vector<Timing> time_algorithms(const Graph& g, const EdgeWeights& w,
                                           const std::vector<NodeSet>& seeds,
                                           const std::vector<Algorithm>& algorithms,
                                           std::uint64_t rng_seed) {
  std::vector<Timing> out;
  for (Algorithm a : algorithms) {
    std::vector<double> secs;
    for (std::size_t r = 0; r < seeds.size(); ++r) {
      CommunitySolver solver{a, stream_seed(rng_seed, "qpeel-r/" + std::to_string(r))};
      secs.push_back(detail::seconds_of([&] { (void)solver.search(g, w, seeds[r]); }));
    }
    Timing t{a, secs.size()};
    for (double s : secs) t.mean += s;
    t.mean /= static_cast<double>(std::max<std::size_t>(1, secs.size()));
    for (double s : secs) t.stddev += (s - t.mean) * (s - t.mean);
    t.stddev = secs.size() > 1 ? std::sqrt(t.stddev / static_cast<double>(secs.size() - 1)) : 0.0;
    out.push_back(t);
  }
  return out;
}

/// Planted-community graph with topic-derived single-attribute profiles, the
/// synthetic stand-in for a co-authorship network.
struct SyntheticNetwork {
  Graph graph;
  ProfileMatrix latent;
};

inline SyntheticNetwork synthetic_network(std::size_t n, std::uint64_t rng_seed, std::size_t dims = 1) {
  PlantedConfig pc;
  pc.nodes = n;
  pc.communities = std::max<std::size_t>(2, n / 100);
  auto grng = make_stream(rng_seed, "graph/" + std::to_string(n));
  PlantedGraph pg = planted_partition(pc, grng);
  auto prng = make_stream(rng_seed, "topics/" + std::to_string(n));
  Incidence inc = topic_incidence(pg.community, pc.communities, TopicConfig{}, prng);
  return {std::move(pg.graph), eigenvector_profiles(inc, dims)};
}

/// Mean and standard deviation of search time per (graph, algorithm) over
/// sampled seed sets.
inline int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    if (cfg.graphs.empty() && cfg.bench_sizes.empty())
      fail(ErrorKind::input, "bench needs --graph files or --nodes sizes");
    if (cfg.graphs.size() > 1 && !cfg.profiles.empty())
      fail(ErrorKind::input, "a profile file applies to a single graph");
    out << "graph,nodes,edges,algorithm,variant,runs,mean_seconds,stddev_seconds\n";
    auto bench_one = [&](const std::string& name, const Graph& g, const ProfileMatrix& latent) {
      Workspace ws = detail::restrict_to_largest_component(g, latent, log);
      EdgeWeights w = proxy_weights(ws.graph, ws.latent, cfg.norm);
      SeedSampling sampling = cfg.sampling;
      sampling.per_group = (cfg.bench_runs + 2) / 3;
      auto rng = make_stream(cfg.rng_seed, "seeds/" + name);
      std::vector<NodeSet> seeds;
      for (const auto& grp : sample_seed_groups(ws.graph, sampling, rng))
        for (const auto& s : grp.sets)
          if (seeds.size() < cfg.bench_runs) seeds.push_back(s);
      for (const Timing& t : time_algorithms(ws.graph, w, seeds, cfg.algorithm_list(), cfg.rng_seed)) {
        auto [family, variant] = algorithm_columns(t.algorithm);
        out << io::csv_field(name) << ',' << ws.graph.node_count() << ',' << ws.graph.edge_count()
            << ',' << family << ',' << variant << ',' << t.runs << ','
            << io::format_real(t.mean) << ',' << io::format_real(t.stddev) << '\n';
      }
    };
    for (const auto& path : cfg.graphs) {
      RunConfig one = cfg;
      one.graphs = {path};
      ProfileMatrix latent;
      std::size_t rows = 0;
      if (!cfg.profiles.empty()) {
        latent = detail::load_or_generate_profiles(cfg, 0);
        rows = latent.rows();
      }
      Graph g = detail::load_graph(path, rows, log);
      if (cfg.profiles.empty()) latent = detail::load_or_generate_profiles(cfg, g.node_count());
      require_rows(g, latent, "latent profile matrix");
      bench_one(path, g, latent);
    }
    for (std::size_t n : cfg.bench_sizes) {
      SyntheticNetwork net = synthetic_network(n, cfg.rng_seed);
      bench_one("synthetic-" + std::to_string(n), net.graph, net.latent);
    }
    return 0;
  } catch (const Error& e) {
    return detail::report(e, log);
  }
}

}  // namespace tension
