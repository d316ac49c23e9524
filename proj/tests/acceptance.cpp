// Prints one PASS/FAIL line per acceptance criterion. With arguments, runs
// only the listed criteria. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "tension/commands.hpp"

using namespace tension;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct RandomInstance {
  Graph g;
  ProfileMatrix x;
};

std::vector<RandomInstance> conformation_instances() {
  std::mt19937_64 rng(stream_seed(1, "conformation"));
  std::uniform_int_distribution<std::size_t> size(5, 200);
  std::uniform_real_distribution<double> density(0.02, 0.5);
  std::vector<RandomInstance> out;
  for (int t = 0; t < 50; ++t) {
    std::size_t n = size(rng);
    Graph g = erdos_renyi(n, density(rng), rng);
    std::size_t m = t % 2 == 0 ? 1 : 6;
    out.push_back({std::move(g), oracle::random_profiles(n, m, rng)});
  }
  return out;
}

Outcome oracle_equivalence() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& inst : conformation_instances()) {
    ProfileMatrix f = conform(inst.g, inst.x, {1e-9, 0}).conformed;
    ProfileMatrix exact = equilibrium_solve(inst.g, inst.x);
    for (std::size_t i = 0; i < f.rows(); ++i)
      for (std::size_t a = 0; a < f.cols(); ++a) worst = std::max(worst, std::abs(f(i, a) - exact(i, a)));
  }
  double secs = elapsed(t0);
  return {worst < 1e-7 && secs < 30.0, "max gap " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome analytic_fixed_point() {
  Graph g(2, {{0, 1}});
  ProfileMatrix x = ProfileMatrix::column({0.0, 1.0});
  ProfileMatrix f = conform(g, x).conformed;
  double t1 = social_tension(g, x, f);
  double t2 = social_tension_by_edges(g, x, f);
  double err = std::max({std::abs(f(0, 0) - 1.0 / 3.0), std::abs(f(1, 0) - 2.0 / 3.0), std::abs(t1 - 4.0 / 9.0)});
  double rel = std::abs(t1 - t2) / std::abs(t2);
  return {err < 1e-9 && rel < 1e-12, "error " + fmt("%.3g", err) + ", formula gap " + fmt("%.3g", rel)};
}

Outcome nash_stationarity() {
  const double eps = 1e-5;
  double worst_grad = 0.0, worst_fd = 0.0;
  for (const auto& inst : conformation_instances()) {
    const Graph& g = inst.g;
    ProfileMatrix f = conform(g, inst.x).conformed;
    for (NodeId i = 0; i < g.node_count(); ++i)
      for (std::size_t a = 0; a < f.cols(); ++a) {
        auto cost = [&](double fi) {
          double c = (fi - inst.x(i, a)) * (fi - inst.x(i, a));
          for (NodeId j : g.neighbors(i)) c += (fi - f(j, a)) * (fi - f(j, a));
          return c;
        };
        double grad = 2.0 * (f(i, a) - inst.x(i, a));
        for (NodeId j : g.neighbors(i)) grad += 2.0 * (f(i, a) - f(j, a));
        double fd = (cost(f(i, a) + eps) - cost(f(i, a) - eps)) / (2.0 * eps);
        worst_grad = std::max(worst_grad, std::abs(grad));
        worst_fd = std::max(worst_fd, std::abs(fd - grad));
      }
  }
  return {worst_grad < 1e-6 && worst_fd < 1e-4,
          "max |grad| " + fmt("%.3g", worst_grad) + ", max fd gap " + fmt("%.3g", worst_fd)};
}

struct SearchInstance {
  Graph g;
  ProfileMatrix x;
  NodeSet q;
};

SearchInstance search_instance(std::mt19937_64& rng, std::size_t n_lo, std::size_t n_hi, std::size_t q_max) {
  std::uniform_int_distribution<std::size_t> size(n_lo, n_hi);
  std::uniform_real_distribution<double> density(0.1, 0.6);
  std::uniform_int_distribution<std::size_t> seeds(1, q_max);
  std::size_t n = size(rng);
  Graph g = erdos_renyi(n, density(rng), rng);
  ProfileMatrix x = oracle::random_profiles(n, rng() % 2 == 0 ? 1 : 3, rng);
  NodeSet q = oracle::random_seeds(g, seeds(rng), rng);
  return {std::move(g), std::move(x), std::move(q)};
}

Outcome feasibility() {
  std::mt19937_64 rng(stream_seed(1, "feasibility"));
  std::size_t violations = 0, runs = 0;
  for (int t = 0; t < 200; ++t) {
    std::mt19937_64 shape(rng());
    PlantedConfig pc{static_cast<std::size_t>(30 + t), 3, 4.0, 1.0, t % 2 == 0 ? 0.0 : 2.5};
    Graph g = t % 3 == 0 ? erdos_renyi(pc.nodes, 0.08, shape) : planted_partition(pc, shape).graph;
    ProfileMatrix x = oracle::random_profiles(g.node_count(), 1 + t % 3, shape);
    NodeSet q = oracle::random_seeds(g, 2 + t % 5, shape);
    EdgeWeights w = proxy_weights(g, x);
    for (Algorithm a : kAllAlgorithms) {
      NodeSet u = CommunitySolver{a, static_cast<std::uint64_t>(t)}.search(g, w, q);
      ++runs;
      if (!u.includes(q) || !oracle::connected_set(g, u)) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(runs) + " runs"};
}

Outcome brute_force() {
  std::mt19937_64 rng(stream_seed(1, "brute-force"));
  std::size_t below = 0, within = 0;
  for (int t = 0; t < 100; ++t) {
    SearchInstance inst = search_instance(rng, 5, 12, 3);
    double best = *oracle::optimum_tension(inst.g, inst.x, inst.q);
    EdgeWeights w = proxy_weights(inst.g, inst.x);
    bool close = false;
    for (Algorithm a : kAllAlgorithms) {
      Solution s = CommunitySolver{a, static_cast<std::uint64_t>(t)}.solve(inst.g, inst.x, w, inst.q);
      if (s.tension < best - 1e-9 * std::max(1.0, best)) ++below;
      if (s.tension <= 2.0 * best + 1e-12) close = true;
    }
    if (close) ++within;
  }
  return {below == 0 && within >= 80,
          std::to_string(below) + " below optimum, " + std::to_string(within) + "/100 within 2x"};
}

Outcome steiner() {
  std::mt19937_64 rng(stream_seed(1, "steiner"));
  std::size_t bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    SearchInstance inst = search_instance(rng, 4, 10, 4);
    std::size_t opt = *oracle::steiner_edges(inst.g, inst.q);
    std::size_t got = qtree_search(inst.g, proxy_weights(inst.g, inst.x), inst.q, PathLength::hops).size() - 1;
    if (got > 2 * opt) ++bad;
    if (opt > 0) worst = std::max(worst, static_cast<double>(got) / static_cast<double>(opt));
  }
  return {bad == 0, std::to_string(bad) + " violations in 200, worst ratio " + fmt("%.2f", worst)};
}

bool profile_aware(Algorithm a) { return is_profile_aware(a); }

Outcome quality_pattern() {
  SyntheticNetwork net = synthetic_network(2000, 7);
  Workspace ws = detail::restrict_to_largest_component(net.graph, net.latent, std::cerr);
  MetricContext ctx(ws.graph, ws.latent);
  auto rng = make_stream(7, "seeds");
  auto groups = sample_seed_groups(ws.graph, SeedSampling{7, 1000, 30}, rng);

  bool pass = true;
  std::ostringstream detail;
  for (const SeedGroup& grp : groups) {
    std::map<Algorithm, std::pair<double, double>> sums;  // tau, mpe
    for (std::size_t r = 0; r < grp.sets.size(); ++r)
      for (Algorithm a : kAllAlgorithms) {
        CommunitySolver solver{a, stream_seed(7, "qpeel-r/" + std::to_string(r))};
        Solution s = solver.solve(ws.graph, ws.latent, ctx.weights(), grp.sets[r]);
        Metrics m = ctx.measure(s, grp.sets[r]);
        sums[a].first += m.tau;
        sums[a].second += m.mpe;
      }
    double aware_tau = 0, aware_mpe = 0, blind_tau = 0, blind_mpe = 0;
    const double sets = static_cast<double>(grp.sets.size());
    detail << "\n    " << grp.label << " (" << grp.sets.size() << " sets)";
    for (auto& [a, v] : sums) {
      v.first /= sets;
      v.second /= sets;
      (profile_aware(a) ? aware_tau : blind_tau) += v.first / (profile_aware(a) ? 3.0 : 2.0);
      (profile_aware(a) ? aware_mpe : blind_mpe) += v.second / (profile_aware(a) ? 3.0 : 2.0);
      detail << ' ' << algorithm_tag(a) << " tau=" << fmt("%.4f", v.first) << " mpe=" << fmt("%.3f", v.second);
    }
    bool tau_ok = aware_tau < blind_tau, mpe_ok = blind_mpe <= aware_mpe;
    std::size_t pair_tau = 0, pair_mpe = 0;
    for (Algorithm a : kAllAlgorithms)
      for (Algorithm b : kAllAlgorithms)
        if (profile_aware(a) && !profile_aware(b)) {
          pair_tau += sums[a].first < sums[b].first;
          pair_mpe += sums[b].second <= sums[a].second;
        }
    detail << "\n      class means: aware tau=" << fmt("%.4f", aware_tau) << " mpe=" << fmt("%.3f", aware_mpe)
           << ", oblivious tau=" << fmt("%.4f", blind_tau) << " mpe=" << fmt("%.3f", blind_mpe)
           << "; pairwise tau " << pair_tau << "/6, mpe " << pair_mpe << "/6";
    pass = pass && tau_ok && mpe_ok && grp.sets.size() >= 30;
  }
  return {pass, "class means per group" + detail.str()};
}

Outcome timing_shape() {
  bool pass = true;
  std::ostringstream detail;
  for (std::size_t n : {500, 2500, 5000}) {
    SyntheticNetwork net = synthetic_network(n, 11);
    Workspace ws = detail::restrict_to_largest_component(net.graph, net.latent, std::cerr);
    EdgeWeights w = proxy_weights(ws.graph, ws.latent);
    auto rng = make_stream(11, "seeds/" + std::to_string(n));
    std::vector<NodeSet> seeds;
    for (const auto& grp : sample_seed_groups(ws.graph, SeedSampling{7, 1000, 10}, rng))
      seeds.insert(seeds.end(), grp.sets.begin(), grp.sets.end());
    std::map<Algorithm, double> mean;
    for (const Timing& t : time_algorithms(ws.graph, w, seeds,
                                           {std::begin(kAllAlgorithms), std::end(kAllAlgorithms)}, 11))
      mean[t.algorithm] = t.mean;
    using A = Algorithm;
    bool order = mean[A::qtree_hops] < mean[A::qtree_weight] && mean[A::qtree_weight] < mean[A::qpeel_random] &&
                 mean[A::qpeel_random] < mean[A::qpeel_max] && mean[A::qpeel_max] <= mean[A::qpeel_sum];
    pass = pass && order;
    detail << "\n    n=" << ws.graph.node_count() << (order ? " ordered:" : " out of order:");
    for (auto [a, m] : mean) detail << ' ' << algorithm_tag(a) << '=' << fmt("%.3g", m);
    if (n == 2500) {
      double gap = mean[A::qpeel_sum] / std::max(mean[A::qtree_hops], mean[A::qtree_weight]);
      pass = pass && gap >= 10.0;
      detail << " gap " << fmt("%.1f", gap) << "x";
    }
  }
  return {pass, "mean search seconds over 30 seed sets" + detail.str()};
}

Outcome team_coverage() {
  std::mt19937_64 rng(stream_seed(1, "team"));
  std::size_t bad = 0, failed = 0, runs = 0;
  for (int t = 0; t < 100; ++t) {
    std::mt19937_64 inst(rng());
    std::size_t n = 40 + static_cast<std::size_t>(t);
    Graph g = planted_partition({n, 4, 5.0, 1.0, 2.5}, inst).graph;
    ProfileMatrix x = oracle::random_profiles(n, 1 + t % 2, inst);
    std::vector<std::string> universe;
    for (int s = 0; s < 10; ++s) universe.push_back("s" + std::to_string(s));
    SkillMap skills(universe, n);
    std::bernoulli_distribution holds(0.06);
    for (NodeId i = 0; i < n; ++i)
      for (SkillId s = 0; s < 10; ++s)
        if (holds(inst)) skills.grant(i, s);
    std::vector<SkillId> all(10);
    std::iota(all.begin(), all.end(), SkillId{0});
    std::vector<SkillId> pick;
    std::sample(all.begin(), all.end(), std::back_inserter(pick), 2 + t % 5, inst);
    Project p(pick);
    for (Algorithm a : kAllAlgorithms) {
      ++runs;
      try {
        TeamResult r = tteam(g, x, skills, p, CommunitySolver{a, static_cast<std::uint64_t>(t)});
        if (!covers(skills, p, r.solution.nodes) || !oracle::connected_set(g, r.solution.nodes)) ++bad;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::infeasible) ++bad;
        ++failed;
      }
    }
  }
  Graph path(3, {{0, 1}, {1, 2}});
  SkillMap s({"a", "b"}, 3);
  s.grant(0, 0);
  s.grant(2, 1);
  std::size_t fixture_bad = 0;
  for (Algorithm a : kAllAlgorithms)
    if (tteam(path, ProfileMatrix::column({0.2, 0.5, 0.7}), s, Project({0, 1}), CommunitySolver{a}).solution.nodes !=
        NodeSet{0, 1, 2})
      ++fixture_bad;
  return {bad == 0 && fixture_bad == 0,
          std::to_string(bad) + " violations in " + std::to_string(runs) + " runs (" + std::to_string(failed) +
              " infeasible), path fixture " + (fixture_bad == 0 ? "ok" : "wrong")};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "tension-acceptance";
  fs::create_directories(dir);
  SyntheticNetwork net = synthetic_network(400, 5);
  {
    std::ofstream g(dir / "graph.txt");
    for (auto [i, j] : net.graph.edges()) g << i << ' ' << j << '\n';
    std::ofstream x(dir / "profiles.txt");
    io::write_profiles(x, net.latent);
    std::ofstream s(dir / "skills.txt");
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> count(1, 8), label(0, 19);
    for (NodeId i = 0; i < net.graph.node_count(); ++i)
      for (int k = 0; k < 2; ++k) s << i << " k" << label(rng) << ' ' << count(rng) << '\n';
  }
  RunConfig cfg;
  cfg.graphs = {(dir / "graph.txt").string()};
  cfg.profiles = (dir / "profiles.txt").string();
  cfg.skills = (dir / "skills.txt").string();
  cfg.sampling = {5, 200, 4};
  cfg.projects = 8;
  cfg.max_skills = 5;
  cfg.rng_seed = 42;
  auto both = [&](int (*cmd)(const RunConfig&, std::ostream&, std::ostream&), const RunConfig& c) {
    std::ostringstream a, b, log;
    int ca = cmd(c, a, log), cb = cmd(c, b, log);
    return ca == 0 && cb == 0 && a.str() == b.str() && !a.str().empty();
  };
  RunConfig gen = cfg;
  gen.profiles.clear();
  gen.scheme = "exponential";
  bool ok = both(cmd_comm, cfg) && both(cmd_team, cfg) && both(cmd_sample_seeds, cfg) &&
            both(cmd_gen_profiles, gen) && both(cmd_comm, gen);
  fs::remove_all(dir);
  return {ok, ok ? "comm, team, sample-seeds and gen-profiles outputs identical across reruns"
                 : "outputs differ between reruns"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"conformation matches the exact solve", oracle_equivalence},
      {"single-edge fixed point", analytic_fixed_point},
      {"equilibria are stationary", nash_stationarity},
      {"outputs contain the seeds and are connected", feasibility},
      {"brute-force optimum bounds", brute_force},
      {"QTree(e) within twice the Steiner minimum", steiner},
      {"profile-aware variants trade edges for lower tension", quality_pattern},
      {"running-time ordering", timing_shape},
      {"team coverage and connectivity", team_coverage},
      {"reruns are byte-identical", determinism},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    int id = static_cast<int>(c) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2d %s: %s | %s\n", id, o.pass ? "PASS" : "FAIL", criteria[c].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
