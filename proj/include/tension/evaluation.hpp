#pragma once

// Standardized solution measures, seed-set sampling and latent profile
// generators for experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tension/community_search.hpp"
#include "tension/error.hpp"
#include "tension/graph.hpp"
#include "tension/profiles.hpp"

namespace tension {

/// Mean of w_ij^2 over the edges of G(u).
inline double avg_sq_weight(const Graph& g, const EdgeWeights& w, const NodeSet& u) {
  require_within(g, u, "node set");
  auto in = u.mask(g.node_count());
  double sum = 0.0;
  std::size_t count = 0;
  for (NodeId i : u) {
    auto nb = g.neighbors(i);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (i < nb[k] && in[nb[k]]) {
        double wk = w.at_slot(g.slot_begin(i) + k);
        sum += wk * wk;
        ++count;
      }
  }
  if (count == 0) fail(ErrorKind::input, "no edges");
  return sum / static_cast<double>(count);
}

/// Mean of w_ij^2 over every edge of `g`.
inline double avg_sq_weight(const Graph& g, const EdgeWeights& w) {
  if (g.edge_count() == 0) fail(ErrorKind::input, "no edges");
  double sum = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) sum += w.at_slot(s) * w.at_slot(s);
  return sum / static_cast<double>(w.size());  // each edge is stored twice
}

struct Metrics {
  double tau = 0.0;          // tension / (2 * tree_edges * avgC(V))
  double mpe = 0.0;          // |E(V')| / tree_edges
  double mpc = 0.0;          // avgC(V') / avgC(V)
  double raw_tension = 0.0;
  std::size_t tree_edges = 0;
  bool degenerate = false;   // edgeless solution or a single seed
};

/// Graph-wide quantities shared by every solution scored against one graph
/// and profile matrix.
class MetricContext {
 public:
  MetricContext(const Graph& g, const ProfileMatrix& latent, WeightNorm norm = WeightNorm::l2)
      : g_(&g), weights_(proxy_weights(g, latent, norm)) {
    if (g.edge_count() == 0) fail(ErrorKind::input, "degenerate profile distribution");
    avg_all_ = avg_sq_weight(g, weights_);
    if (!(avg_all_ > 0.0)) fail(ErrorKind::input, "degenerate profile distribution");
  }

  const Graph& graph() const noexcept { return *g_; }
  const EdgeWeights& weights() const noexcept { return weights_; }
  double graph_avg_sq_weight() const noexcept { return avg_all_; }

  /// Edges of a spanning tree inside the hop-length QTree connector of `q`.
  std::size_t seed_tree_edges(const NodeSet& q) const {
    return qtree_search(*g_, weights_, q, PathLength::hops).size() - 1;
  }

  Metrics measure(const Solution& s, const NodeSet& q) const {
    if (!s.nodes.includes(q)) fail(ErrorKind::input, "solution does not contain the seeds");
    Metrics out;
    out.raw_tension = s.tension;
    out.tree_edges = seed_tree_edges(q);
    const std::size_t edges = induced_edge_count(*g_, s.nodes);
    if (edges == 0) {
      out.degenerate = true;
      out.mpc = 0.0;
    } else {
      out.mpc = avg_sq_weight(*g_, weights_, s.nodes) / avg_all_;
    }
    if (out.tree_edges == 0) {
      out.degenerate = true;
      out.tau = 0.0;
      out.mpe = 0.0;
    } else {
      const double t = static_cast<double>(out.tree_edges);
      out.tau = s.tension / (2.0 * t * avg_all_);
      out.mpe = static_cast<double>(edges) / t;
    }
    return out;
  }

 private:
  const Graph* g_;
  EdgeWeights weights_;
  double avg_all_ = 0.0;
};

inline Metrics metrics(const Graph& g, const ProfileMatrix& latent, const Solution& s,
                       const NodeSet& q, WeightNorm norm = WeightNorm::l2) {
  return MetricContext(g, latent, norm).measure(s, q);
}

struct SeedGroup {
  std::string label;
  std::vector<NodeSet> sets;
  std::vector<int> spread;  // max pairwise hop distance of each set
};

struct SeedSampling {
  std::size_t set_size = 3;
  std::size_t candidates = 1000;
  std::size_t per_group = 30;
};

/// Largest pairwise hop distance within `u` (all members must be connected).
inline int max_pairwise_hops(const Graph& g, const NodeSet& u) {
  int worst = 0;
  for (std::size_t a = 0; a + 1 < u.size(); ++a) {
    auto dist = bfs_distances(g, u[a]);
    for (std::size_t b = a + 1; b < u.size(); ++b) worst = std::max(worst, dist[u[b]]);
  }
  return worst;
}

/// Draws random seed sets from the largest component and groups them into
/// D1, D2, D3 by the rank of their spread: ranks in the 10-33%, 33-66% and
/// 66-90% bands, tight to dispersed. Ties in spread keep sampling order.
inline std::vector<SeedGroup> sample_seed_groups(const Graph& g, const SeedSampling& cfg,
                                                 std::mt19937_64& rng) {
  if (cfg.set_size == 0) fail(ErrorKind::input, "seed sets must be nonempty");
  NodeSet lcc = largest_component(g);
  if (lcc.size() < cfg.set_size) fail(ErrorKind::infeasible, "component too small");

  const std::size_t total = cfg.candidates;
  std::vector<NodeSet> pool;
  std::vector<int> spread;
  pool.reserve(total);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<NodeId> pick;
    std::sample(lcc.begin(), lcc.end(), std::back_inserter(pick),
                static_cast<std::ptrdiff_t>(cfg.set_size), rng);
    pool.emplace_back(std::move(pick));
    spread.push_back(max_pairwise_hops(g, pool.back()));
  }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return spread[a] < spread[b]; });

  const double bands[4] = {0.10, 0.33, 0.66, 0.90};
  const char* labels[3] = {"D1", "D2", "D3"};
  std::vector<SeedGroup> groups;
  for (int k = 0; k < 3; ++k) {
    auto lo = static_cast<std::size_t>(std::floor(bands[k] * static_cast<double>(total)));
    auto hi = static_cast<std::size_t>(std::floor(bands[k + 1] * static_cast<double>(total)));
    std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                     order.begin() + static_cast<std::ptrdiff_t>(hi));
    std::sort(members.begin(), members.end());
    SeedGroup grp{labels[k], {}, {}};
    for (std::size_t idx : members) {
      if (grp.sets.size() == cfg.per_group) break;
      grp.sets.push_back(pool[idx]);
      grp.spread.push_back(spread[idx]);
    }
    groups.push_back(std::move(grp));
  }
  return groups;
}

/// Sparse node x feature incidence counts.
struct Incidence {
  std::size_t nodes = 0;
  std::size_t features = 0;
  struct Entry {
    NodeId node;
    std::uint32_t feature;
    double value;
  };
  std::vector<Entry> entries;
};

/// Left singular vectors of the incidence matrix for its m largest singular
/// values, each column affinely rescaled onto [0, 1]. Signs are fixed so the
/// largest-magnitude entry of every vector is positive. A constant column
/// maps to 0.5.
inline ProfileMatrix eigenvector_profiles(const Incidence& inc, std::size_t m) {
  if (m == 0) fail(ErrorKind::input, "profile dimension must be positive");
  const auto n = static_cast<Eigen::Index>(inc.nodes);
  const auto f = static_cast<Eigen::Index>(inc.features);
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, f);
  for (const auto& e : inc.entries) {
    if (e.node >= inc.nodes || e.feature >= inc.features)
      fail(ErrorKind::input, "incidence entry outside the matrix");
    mat(e.node, e.feature) += e.value;
  }

  // Eigenpairs of the smaller Gram matrix; eigenvalues come back ascending.
  const bool feature_side = f <= n;
  Eigen::MatrixXd gram = feature_side ? Eigen::MatrixXd(mat.transpose() * mat)
                                      : Eigen::MatrixXd(mat * mat.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) fail(ErrorKind::non_convergence, "eigensolver failed");
  const Eigen::Index dim = gram.rows();
  const double top = dim > 0 ? eig.eigenvalues()(dim - 1) : 0.0;
  if (static_cast<Eigen::Index>(m) > dim)
    fail(ErrorKind::input, "requested more eigenvectors than the incidence matrix has");

  ProfileMatrix out(inc.nodes, m);
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::Index col = dim - 1 - static_cast<Eigen::Index>(k);
    const double lambda = eig.eigenvalues()(col);
    if (!(top > 0.0) || lambda <= 1e-12 * top)
      fail(ErrorKind::input, "requested more eigenvectors than the incidence matrix has");
    Eigen::VectorXd u = feature_side
                            ? Eigen::VectorXd(mat * eig.eigenvectors().col(col) / std::sqrt(lambda))
                            : Eigen::VectorXd(eig.eigenvectors().col(col));
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0) u = -u;
    const double lo = u.minCoeff();
    const double hi = u.maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i)
      out(static_cast<std::size_t>(i), k) = hi - lo > 1e-12 ? (u(i) - lo) / (hi - lo) : 0.5;
  }
  return out;
}

struct ProfileScheme {
  enum class Kind { uniform, exponential, thresholded } kind = Kind::uniform;
  double lambda = 6.0;  // exponential rate
  double alpha = 0.6;   // thresholded: fraction of nodes set to zero
};

/// Random latent profiles. Exponential draws above 1 are clamped to 1; the
/// thresholded scheme zeroes round(alpha * n) randomly chosen nodes and draws
/// the rest uniformly.
inline ProfileMatrix generate_profiles(std::size_t n, std::size_t m, const ProfileScheme& scheme,
                                       std::mt19937_64& rng) {
  if (m == 0) fail(ErrorKind::input, "profile dimension must be positive");
  ProfileMatrix out(n, m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (scheme.kind) {
    case ProfileScheme::Kind::uniform:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a) out(i, a) = unit(rng);
      break;
    case ProfileScheme::Kind::exponential: {
      if (!(scheme.lambda > 0)) fail(ErrorKind::input, "exponential rate must be positive");
      std::exponential_distribution<double> expo(scheme.lambda);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a) out(i, a) = std::min(1.0, expo(rng));
      break;
    }
    case ProfileScheme::Kind::thresholded: {
      if (!(scheme.alpha >= 0 && scheme.alpha <= 1))
        fail(ErrorKind::input, "threshold fraction must lie in [0, 1]");
      auto zeroed = static_cast<std::size_t>(std::llround(scheme.alpha * static_cast<double>(n)));
      std::vector<NodeId> order(n);
      std::iota(order.begin(), order.end(), NodeId{0});
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<char> is_zero(n, 0);
      for (std::size_t k = 0; k < zeroed; ++k) is_zero[order[k]] = 1;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a) out(i, a) = is_zero[i] ? 0.0 : unit(rng);
      break;
    }
  }
  return out;
}

}  // namespace tension
