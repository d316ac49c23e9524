#pragma once

// Text formats: edge lists, profile matrices, seed sets, skills, projects,
// incidence counts and metrics CSV. Parse errors name the source and line.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tension/error.hpp"
#include "tension/evaluation.hpp"
#include "tension/graph.hpp"
#include "tension/profiles.hpp"
#include "tension/community_search.hpp"
#include "tension/team_formation.hpp"

namespace tension::io {

/// Reads the lines of a text source, skipping blanks and '#' comments.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  /// Next content line split on whitespace; false at end of input.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++number_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      fields = split(line_);
      if (fields.empty() || fields.front().front() == '#') continue;
      return true;
    }
    return false;
  }

  const std::string& line() const noexcept { return line_; }
  std::size_t number() const noexcept { return number_; }
  const std::string& source() const noexcept { return source_; }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::input, source_ + ":" + std::to_string(number_) + ": " + what);
  }

  std::string where() const { return source_ + ":" + std::to_string(number_); }

  NodeId node(std::string_view text) const {
    NodeId v = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size())
      error("expected a node id, got '" + std::string(text) + "'");
    return v;
  }

  double real(std::string_view text) const {
    double v = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
      error("expected a number, got '" + std::string(text) + "'");
    return v;
  }

  static std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      std::size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j > i) out.push_back(s.substr(i, j - i));
      i = j;
    }
    return out;
  }

 private:
  std::istream& in_;
  std::string source_;
  std::string line_;
  std::size_t number_ = 0;
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::input, "cannot open " + path);
  return in;
}

struct EdgeList {
  std::size_t node_count = 0;  // largest id + 1
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::string> warnings;
};

/// "i j" per line. Self-loops are dropped with a warning; duplicates and
/// reversed pairs collapse when the graph is built.
inline EdgeList read_edge_list(std::istream& in, const std::string& source = "edge list") {
  LineReader r(in, source);
  EdgeList out;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    if (f.size() != 2) r.error("expected two node ids");
    NodeId a = r.node(f[0]), b = r.node(f[1]);
    out.node_count = std::max<std::size_t>(out.node_count, std::size_t{std::max(a, b)} + 1);
    if (a == b) {
      out.warnings.push_back(r.where() + ": self-loop on node " + std::to_string(a) + " ignored");
      continue;
    }
    out.edges.emplace_back(a, b);
  }
  return out;
}

/// One row of m reals in [0, 1] per node; row index is the node id.
inline ProfileMatrix read_profiles(std::istream& in, const std::string& source = "profiles") {
  LineReader r(in, source);
  std::vector<double> values;
  std::size_t cols = 0, rows = 0;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    if (rows == 0) cols = f.size();
    if (f.size() != cols)
      r.error("expected " + std::to_string(cols) + " values, got " + std::to_string(f.size()));
    for (auto field : f) {
      double v = r.real(field);
      if (v < 0.0 || v > 1.0) r.error("profile value " + std::string(field) + " outside [0, 1]");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) fail(ErrorKind::input, source + ": no profile rows");
  ProfileMatrix p(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t a = 0; a < cols; ++a) p(i, a) = values[i * cols + a];
  return p;
}

struct SeedEntry {
  std::string group;  // from the latest "# group <label>" line, or empty
  NodeSet seeds;
};

/// One seed set per line. A "# group <label>" comment labels the sets that
/// follow it.
inline std::vector<SeedEntry> read_seed_sets(std::istream& in,
                                             const std::string& source = "seeds") {
  std::vector<SeedEntry> out;
  std::string group;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto f = LineReader::split(line);
    if (f.empty()) continue;
    if (f.front().front() == '#') {
      if (f.size() == 3 && f[0] == "#" && f[1] == "group") group = std::string(f[2]);
      continue;
    }
    std::vector<NodeId> ids;
    for (auto field : f) {
      NodeId v = 0;
      auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || end != field.data() + field.size())
        fail(ErrorKind::input, source + ":" + std::to_string(number) +
                                   ": expected a node id, got '" + std::string(field) + "'");
      ids.push_back(v);
    }
    out.push_back({group, NodeSet(std::move(ids))});
  }
  return out;
}

/// "node_id skill_label count" per line; a node holds a skill when its count
/// reaches `threshold`. Every label seen joins the universe, sorted.
inline SkillMap read_skills(std::istream& in, std::size_t node_count, double threshold,
                            const std::string& source = "skills") {
  LineReader r(in, source);
  struct Row {
    NodeId node;
    std::string label;
    double count;
  };
  std::vector<Row> rows;
  std::map<std::string, SkillId> labels;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    if (f.size() != 3) r.error("expected 'node_id skill_label count'");
    NodeId v = r.node(f[0]);
    if (v >= node_count) r.error("node " + std::to_string(v) + " outside the graph");
    double c = r.real(f[2]);
    if (c < 0) r.error("negative count");
    rows.push_back({v, std::string(f[1]), c});
    labels.emplace(std::string(f[1]), 0);
  }
  std::vector<std::string> universe;
  for (auto& [label, id] : labels) {
    id = static_cast<SkillId>(universe.size());
    universe.push_back(label);
  }
  SkillMap skills(std::move(universe), node_count);
  for (const Row& row : rows)
    if (row.count >= threshold) skills.grant(row.node, labels.at(row.label));
  return skills;
}

/// Skill labels, one project per line.
inline std::vector<std::vector<std::string>> read_projects(std::istream& in,
                                                           const std::string& source = "project") {
  LineReader r(in, source);
  std::vector<std::vector<std::string>> out;
  std::vector<std::string_view> f;
  while (r.next(f)) out.emplace_back(f.begin(), f.end());
  if (out.empty()) fail(ErrorKind::input, source + ": no project");
  return out;
}

/// "node_id feature_label [count]" per line, count defaulting to 1. Features
/// are indexed in sorted label order.
inline Incidence read_incidence(std::istream& in, std::size_t node_count,
                                const std::string& source = "incidence") {
  LineReader r(in, source);
  struct Row {
    NodeId node;
    std::string label;
    double count;
  };
  std::vector<Row> rows;
  std::map<std::string, std::uint32_t> labels;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    if (f.size() != 2 && f.size() != 3) r.error("expected 'node_id feature_label [count]'");
    NodeId v = r.node(f[0]);
    if (v >= node_count) r.error("node " + std::to_string(v) + " outside the graph");
    double c = f.size() == 3 ? r.real(f[2]) : 1.0;
    rows.push_back({v, std::string(f[1]), c});
    labels.emplace(std::string(f[1]), 0);
  }
  std::uint32_t next = 0;
  for (auto& [label, id] : labels) id = next++;
  Incidence inc;
  inc.nodes = node_count;
  inc.features = labels.size();
  for (const Row& row : rows) inc.entries.push_back({row.node, labels.at(row.label), row.count});
  return inc;
}

/// Shortest decimal that reads back to the same double.
inline std::string format_real(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void write_profiles(std::ostream& out, const ProfileMatrix& p) {
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t a = 0; a < p.cols(); ++a) out << (a ? " " : "") << format_real(p(i, a));
    out << '\n';
  }
}

inline void write_seed_groups(std::ostream& out, const std::vector<SeedGroup>& groups) {
  for (const SeedGroup& grp : groups) {
    out << "# group " << grp.label << '\n';
    for (const NodeSet& s : grp.sets) {
      for (std::size_t k = 0; k < s.size(); ++k) out << (k ? " " : "") << s[k];
      out << '\n';
    }
  }
}

struct MetricsRow {
  std::string run_id;
  std::string algorithm;
  std::string variant;
  std::string group;
  std::optional<double> tau, mpe, mpc, raw_tension;  // empty prints as NA
  std::optional<std::size_t> nodes, edges;
  std::optional<double> seconds;
  std::string status = "ok";
  std::string note;

  void set(const Metrics& m, const Solution& s) {
    tau = m.tau;
    mpe = m.mpe;
    mpc = m.mpc;
    raw_tension = m.raw_tension;
    nodes = s.nodes.size();
    edges = s.edges_induced;
  }
};

inline constexpr std::string_view kMetricsHeader =
    "run_id,algorithm,variant,group,tau,mpe,mpc,raw_tension,nodes,edges,seconds,status,note";

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline void write_metrics_row(std::ostream& out, const MetricsRow& row) {
  auto real = [](std::optional<double> v) { return v ? format_real(*v) : std::string("NA"); };
  auto count = [](std::optional<std::size_t> v) { return v ? std::to_string(*v) : std::string("NA"); };
  out << csv_field(row.run_id) << ',' << csv_field(row.algorithm) << ',' << csv_field(row.variant)
      << ',' << csv_field(row.group) << ',' << real(row.tau) << ',' << real(row.mpe) << ','
      << real(row.mpc) << ',' << real(row.raw_tension) << ',' << count(row.nodes) << ','
      << count(row.edges) << ',' << real(row.seconds) << ',' << csv_field(row.status) << ','
      << csv_field(row.note) << '\n';
}

}  // namespace tension::io
