#pragma once

// Repeated-averaging conformation of profiles and the social tension it
// induces.
//
// Every node i holds a latent profile x_i and publicly adopts a conformed
// profile f_i. Its tension is
//
//   o_i = (x_i - f_i)^2 + sum_{j in N(i)} (f_i - f_j)^2
//
// and the social tension of a graph is the sum of o_i over its nodes. The
// averaging update f_i <- (x_i + sum_j f_j) / (1 + deg i) has a unique fixed
// point, the solution of (I + D - A) f = x, at which every f_i minimizes o_i
// given its neighbors. Attributes never interact: all of the above applies
// column by column.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "tension/error.hpp"
#include "tension/graph.hpp"
#include "tension/profiles.hpp"

namespace tension {

struct ConformOptions {
  double tol = 1e-9;            // max-norm step that ends the iteration
  std::size_t max_iter = 0;     // 0 selects max(100 * n, 10000)

  std::size_t iteration_cap(std::size_t n) const {
    return max_iter != 0 ? max_iter : std::max<std::size_t>(100 * n, 10000);
  }
};

struct ConformationResult {
  ProfileMatrix conformed;
  std::size_t iterations = 0;
  double residual = 0.0;  // max-norm change of the last update
};

/// Raised when the iteration cap is reached; carries the last iterate.
class NonConvergence : public Error {
 public:
  NonConvergence(ConformationResult last)
      : Error(ErrorKind::non_convergence,
              "conformation did not converge after " + std::to_string(last.iterations) +
                  " iterations (residual " + std::to_string(last.residual) + ")"),
        last_(std::move(last)) {}
  const ConformationResult& last_iterate() const noexcept { return last_; }

 private:
  ConformationResult last_;
};

/// Synchronous (Jacobi) repeated averaging started from f(0) = x.
///
/// Stops after the first step whose max-norm change is below `tol`; the
/// returned matrix is that last iterate.
inline ConformationResult conform(const Graph& g, const ProfileMatrix& latent,
                                  const ConformOptions& opts = {}) {
  require_rows(g, latent, "latent profile matrix");
  if (!(opts.tol > 0)) fail(ErrorKind::input, "tolerance must be positive");
  const std::size_t n = g.node_count();
  const std::size_t m = latent.cols();
  const std::size_t cap = opts.iteration_cap(n);

  ProfileMatrix current = latent;
  ProfileMatrix next(n, m);
  std::vector<double> acc(m);
  ConformationResult result;
  for (std::size_t it = 1;; ++it) {
    double change = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      auto nb = g.neighbors(i);
      auto xi = latent.row(i);
      std::copy(xi.begin(), xi.end(), acc.begin());
      for (NodeId j : nb) {
        auto fj = current.row(j);
        for (std::size_t a = 0; a < m; ++a) acc[a] += fj[a];
      }
      const double denom = 1.0 + static_cast<double>(nb.size());
      auto out = next.row(i);
      auto prev = current.row(i);
      for (std::size_t a = 0; a < m; ++a) {
        out[a] = nb.empty() ? xi[a] : acc[a] / denom;
        change = std::max(change, std::abs(out[a] - prev[a]));
      }
    }
    std::swap(current, next);
    result.iterations = it;
    result.residual = change;
    if (change < opts.tol) break;
    if (it >= cap) {
      result.conformed = std::move(current);
      throw NonConvergence(std::move(result));
    }
  }
  result.conformed = std::move(current);
  return result;
}

/// Exact fixed point: solves (I + D - A) f_a = x_a for every column with a
/// sparse Cholesky factorization.
inline ProfileMatrix equilibrium_solve(const Graph& g, const ProfileMatrix& latent) {
  require_rows(g, latent, "latent profile matrix");
  const std::size_t n = g.node_count();
  const std::size_t m = latent.cols();
  using SpMat = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n + 2 * g.edge_count());
  for (NodeId i = 0; i < n; ++i) {
    auto ii = static_cast<int>(i);
    triplets.emplace_back(ii, ii, 1.0 + static_cast<double>(g.degree(i)));
    for (NodeId j : g.neighbors(i)) triplets.emplace_back(ii, static_cast<int>(j), -1.0);
  }
  SpMat system(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  system.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<SpMat> solver(system);
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::non_convergence, "equilibrium factorization failed");

  ProfileMatrix out(n, m);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t i = 0; i < n; ++i) rhs[static_cast<Eigen::Index>(i)] = latent(i, a);
    Eigen::VectorXd f = solver.solve(rhs);
    for (std::size_t i = 0; i < n; ++i) out(i, a) = f[static_cast<Eigen::Index>(i)];
  }
  return out;
}

/// max_{i,a} |f_ia - (x_ia + sum_j f_ja) / (1 + deg i)|
inline double equilibrium_residual(const Graph& g, const ProfileMatrix& latent,
                                   const ProfileMatrix& conformed) {
  require_rows(g, latent, "latent profile matrix");
  require_rows(g, conformed, "conformed profile matrix");
  double worst = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i)
    for (std::size_t a = 0; a < latent.cols(); ++a) {
      double acc = latent(i, a);
      for (NodeId j : g.neighbors(i)) acc += conformed(j, a);
      double avg = acc / (1.0 + static_cast<double>(g.degree(i)));
      worst = std::max(worst, std::abs(conformed(i, a) - avg));
    }
  return worst;
}

namespace detail {
inline void require_same_shape(const ProfileMatrix& latent, const ProfileMatrix& conformed) {
  if (latent.rows() != conformed.rows() || latent.cols() != conformed.cols())
    fail(ErrorKind::input, "latent and conformed profiles differ in shape");
}
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}
}  // namespace detail

/// o_i: inner tension of node i plus its cross tension with each neighbor,
/// summed over attributes.
inline double node_tension(const Graph& g, const ProfileMatrix& latent,
                           const ProfileMatrix& conformed, NodeId i) {
  detail::require_same_shape(latent, conformed);
  require_rows(g, latent, "latent profile matrix");
  if (!g.contains(i)) fail(ErrorKind::input, "invalid node id " + std::to_string(i));
  double t = detail::squared_distance(latent.row(i), conformed.row(i));
  for (NodeId j : g.neighbors(i)) t += detail::squared_distance(conformed.row(i), conformed.row(j));
  return t;
}

/// Sum of node tensions.
inline double social_tension(const Graph& g, const ProfileMatrix& latent,
                             const ProfileMatrix& conformed) {
  detail::require_same_shape(latent, conformed);
  require_rows(g, latent, "latent profile matrix");
  double t = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i) t += node_tension(g, latent, conformed, i);
  return t;
}

/// Same quantity as `social_tension`, accumulated as total inner tension plus
/// twice the cross tension of every edge.
inline double social_tension_by_edges(const Graph& g, const ProfileMatrix& latent,
                                      const ProfileMatrix& conformed) {
  detail::require_same_shape(latent, conformed);
  require_rows(g, latent, "latent profile matrix");
  double inner = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i)
    inner += detail::squared_distance(latent.row(i), conformed.row(i));
  double cross = 0.0;
  for (auto [i, j] : g.edges()) cross += detail::squared_distance(conformed.row(i), conformed.row(j));
  return inner + 2.0 * cross;
}

/// Social tension of `g` at the equilibrium reached by `conform`.
inline double equilibrium_tension(const Graph& g, const ProfileMatrix& latent,
                                  const ConformOptions& opts = {}) {
  auto r = conform(g, latent, opts);
  return social_tension(g, latent, r.conformed);
}

}  // namespace tension
