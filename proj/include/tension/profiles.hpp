#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tension/error.hpp"
#include "tension/graph.hpp"

namespace tension {

/// Dense row-major n x m matrix of profile values, one row per node and one
/// column per attribute.
class ProfileMatrix {
 public:
  ProfileMatrix() = default;
  ProfileMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  /// Single-attribute profile from one value per node.
  static ProfileMatrix column(std::span<const double> values) {
    ProfileMatrix p(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) p(i, 0) = values[i];
    return p;
  }
  static ProfileMatrix column(std::initializer_list<double> values) {
    return column(std::span<const double>(values.begin(), values.size()));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t a) { return values_[i * cols_ + a]; }
  double operator()(std::size_t i, std::size_t a) const { return values_[i * cols_ + a]; }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }

  std::vector<double> column_values(std::size_t a) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, a);
    return out;
  }

  /// Rows listed in `nodes`, in that order.
  ProfileMatrix select_rows(std::span<const NodeId> nodes) const {
    ProfileMatrix out(nodes.size(), cols_);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      auto src = row(nodes[k]);
      std::copy(src.begin(), src.end(), out.row(k).begin());
    }
    return out;
  }

  ProfileMatrix select_column(std::size_t a) const {
    ProfileMatrix out(rows_, 1);
    for (std::size_t i = 0; i < rows_; ++i) out(i, 0) = (*this)(i, a);
    return out;
  }

  const std::vector<double>& data() const noexcept { return values_; }

  friend bool operator==(const ProfileMatrix&, const ProfileMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline void require_rows(const Graph& g, const ProfileMatrix& p, const char* what) {
  if (p.rows() != g.node_count())
    fail(ErrorKind::input, std::string(what) + " has " + std::to_string(p.rows()) +
                               " rows but the graph has " + std::to_string(g.node_count()) +
                               " nodes");
  if (p.cols() == 0) fail(ErrorKind::input, std::string(what) + " has no attributes");
}

}  // namespace tension
