// Command-line front end. Settings come from an optional JSON config file
// (--config) and are then overridden by any flag given explicitly.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tension/commands.hpp"

namespace {

using tension::RunConfig;
using Json = nlohmann::json;

struct Flags {
  std::string config;
  std::vector<std::string> graphs;
  std::string profiles, incidence, seeds, skills, project, out, scheme, weight_norm;
  std::vector<std::string> variants;
  double tol = 0, lambda = 0, alpha = 0, skill_threshold = 0;
  std::size_t max_iter = 0, dims = 0, set_size = 0, candidates = 0, per_group = 0;
  std::size_t projects = 0, min_skills = 0, max_skills = 0, k = 0, runs = 0;
  std::vector<std::size_t> nodes;
  std::uint64_t seed = 0;
  bool timing = false;
};

std::vector<tension::Algorithm> parse_variants(const std::vector<std::string>& keys) {
  std::vector<tension::Algorithm> out;
  for (const auto& key : keys) {
    if (key == "all") return {};
    auto a = tension::parse_algorithm(key);
    if (!a) tension::fail(tension::ErrorKind::input, "unknown variant '" + key + "'");
    out.push_back(*a);
  }
  return out;
}

tension::WeightNorm parse_weight_norm(const std::string& s) {
  auto n = tension::parse_norm(s);
  if (!n) tension::fail(tension::ErrorKind::input, "unknown weight norm '" + s + "'");
  return *n;
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) tension::fail(tension::ErrorKind::input, "cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    tension::fail(tension::ErrorKind::input, path + ": " + e.what());
  }
  try {
    for (auto& [key, v] : j.items()) {
      if (key == "graph") {
        cfg.graphs = v.is_array() ? v.get<std::vector<std::string>>()
                                  : std::vector<std::string>{v.get<std::string>()};
      } else if (key == "profiles") cfg.profiles = v.get<std::string>();
      else if (key == "incidence") cfg.incidence = v.get<std::string>();
      else if (key == "seeds") cfg.seeds = v.get<std::string>();
      else if (key == "skills") cfg.skills = v.get<std::string>();
      else if (key == "project") cfg.project = v.get<std::string>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "scheme") cfg.scheme = v.get<std::string>();
      else if (key == "dims") cfg.dims = v.get<std::size_t>();
      else if (key == "lambda") cfg.lambda = v.get<double>();
      else if (key == "alpha") cfg.alpha = v.get<double>();
      else if (key == "nodes") {
        auto sizes = v.is_array() ? v.get<std::vector<std::size_t>>()
                                  : std::vector<std::size_t>{v.get<std::size_t>()};
        cfg.nodes = sizes.front();
        cfg.bench_sizes = sizes;
      } else if (key == "set_size") cfg.sampling.set_size = v.get<std::size_t>();
      else if (key == "candidates") cfg.sampling.candidates = v.get<std::size_t>();
      else if (key == "per_group") cfg.sampling.per_group = v.get<std::size_t>();
      else if (key == "projects") cfg.projects = v.get<std::size_t>();
      else if (key == "min_skills") cfg.min_skills = v.get<std::size_t>();
      else if (key == "max_skills") cfg.max_skills = v.get<std::size_t>();
      else if (key == "variant") {
        cfg.algorithms = parse_variants(v.is_array() ? v.get<std::vector<std::string>>()
                                                     : std::vector<std::string>{v.get<std::string>()});
      } else if (key == "seed") cfg.rng_seed = v.get<std::uint64_t>();
      else if (key == "tol") cfg.conform.tol = v.get<double>();
      else if (key == "max_iter") cfg.conform.max_iter = v.get<std::size_t>();
      else if (key == "weight_norm") cfg.norm = parse_weight_norm(v.get<std::string>());
      else if (key == "skill_threshold") cfg.skill_threshold = v.get<double>();
      else if (key == "k") cfg.k = v.get<std::size_t>();
      else if (key == "timing") cfg.timing = v.get<bool>();
      else if (key == "runs") cfg.bench_runs = v.get<std::size_t>();
      else tension::fail(tension::ErrorKind::input, path + ": unknown key '" + key + "'");
    }
  } catch (const Json::exception& e) {
    tension::fail(tension::ErrorKind::input, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-tension community search and team formation"};
  app.require_subcommand(1);
  Flags f;
  std::map<std::string, CLI::Option*> opt;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, std::ostream&, std::ostream&);
  };
  const Command commands[] = {
      {"conform", "conform latent profiles and report the social tension", tension::cmd_conform},
      {"comm", "community search over seed sets", tension::cmd_comm},
      {"team", "team formation over projects", tension::cmd_team},
      {"cardinality", "greedy community of a fixed size", tension::cmd_cardinality},
      {"bench", "running time of every algorithm", tension::cmd_bench},
      {"gen-profiles", "generate a latent profile matrix", tension::cmd_gen_profiles},
      {"sample-seeds", "sample D1-D3 seed groups", tension::cmd_sample_seeds},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    subs.emplace_back(sub, &c);
    auto add = [&](const std::string& name, auto& var, const std::string& help) {
      opt[name + "@" + c.name] = sub->add_option("--" + name, var, help);
    };
    add("config", f.config, "JSON config file; flags override its values");
    add("graph", f.graphs, "edge list file (repeatable for bench)");
    add("profiles", f.profiles, "latent profile matrix file");
    add("incidence", f.incidence, "incidence file for eigenvector profiles");
    add("seeds", f.seeds, "seed-set file");
    add("skills", f.skills, "skills file");
    add("project", f.project, "project file");
    add("variant", f.variants, "qtree-e, qtree-s, qpeel-r, qpeel-s, qpeel-m or all (repeatable)");
    add("tol", f.tol, "conformation tolerance");
    add("max-iter", f.max_iter, "conformation iteration cap (0 = automatic)");
    add("weight-norm", f.weight_norm, "l2, l1 or max");
    add("skill-threshold", f.skill_threshold, "count at which a node holds a skill");
    add("seed", f.seed, "master random seed");
    add("out", f.out, "output file (default stdout)");
    add("scheme", f.scheme, "profile generator: uniform, exponential, thresholded, eigenvector");
    add("dims", f.dims, "profile attributes");
    add("lambda", f.lambda, "exponential rate");
    add("alpha", f.alpha, "fraction of zeroed profiles");
    add("nodes", f.nodes, "node count for gen-profiles; synthetic sizes for bench (repeatable)");
    add("set-size", f.set_size, "seeds per sampled set");
    add("candidates", f.candidates, "sampled candidate seed sets");
    add("per-group", f.per_group, "seed sets kept per group");
    add("projects", f.projects, "sampled projects");
    add("min-skills", f.min_skills, "smallest sampled project");
    add("max-skills", f.max_skills, "largest sampled project");
    add("k", f.k, "community size for cardinality");
    add("runs", f.runs, "seed sets timed per graph in bench");
    opt[std::string("timing@") + c.name] = sub->add_flag("--timing", f.timing, "fill the seconds column");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (auto [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    auto given = [&](const std::string& name) {
      return opt.at(name + "@" + cmd->name)->count() > 0;
    };
    RunConfig cfg;
    try {
      if (given("config")) apply_config_file(f.config, cfg);
      if (given("graph")) cfg.graphs = f.graphs;
      if (given("profiles")) cfg.profiles = f.profiles;
      if (given("incidence")) cfg.incidence = f.incidence;
      if (given("seeds")) cfg.seeds = f.seeds;
      if (given("skills")) cfg.skills = f.skills;
      if (given("project")) cfg.project = f.project;
      if (given("variant")) cfg.algorithms = parse_variants(f.variants);
      if (given("tol")) cfg.conform.tol = f.tol;
      if (given("max-iter")) cfg.conform.max_iter = f.max_iter;
      if (given("weight-norm")) cfg.norm = parse_weight_norm(f.weight_norm);
      if (given("skill-threshold")) cfg.skill_threshold = f.skill_threshold;
      if (given("seed")) cfg.rng_seed = f.seed;
      if (given("out")) cfg.out = f.out;
      if (given("scheme")) cfg.scheme = f.scheme;
      if (given("dims")) cfg.dims = f.dims;
      if (given("lambda")) cfg.lambda = f.lambda;
      if (given("alpha")) cfg.alpha = f.alpha;
      if (given("nodes")) {
        cfg.nodes = f.nodes.front();
        cfg.bench_sizes = f.nodes;
      }
      if (given("set-size")) cfg.sampling.set_size = f.set_size;
      if (given("candidates")) cfg.sampling.candidates = f.candidates;
      if (given("per-group")) cfg.sampling.per_group = f.per_group;
      if (given("projects")) cfg.projects = f.projects;
      if (given("min-skills")) cfg.min_skills = f.min_skills;
      if (given("max-skills")) cfg.max_skills = f.max_skills;
      if (given("k")) cfg.k = f.k;
      if (given("runs")) cfg.bench_runs = f.runs;
      if (given("timing")) cfg.timing = f.timing;
    } catch (const tension::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return e.exit_code();
    }

    // Buffer so a failed run never leaves a truncated output file.
    std::ostringstream buffer;
    int code = cmd->run(cfg, buffer, std::cerr);
    if (code != 0) return code;
    if (cfg.out.empty()) {
      std::cout << buffer.str();
    } else {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file) {
        std::cerr << "error: cannot write " << cfg.out << '\n';
        return 1;
      }
      file << buffer.str();
    }
    return 0;
  }
  return 1;
}
