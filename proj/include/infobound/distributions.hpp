#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "infobound/common.hpp"

namespace infobound {

inline constexpr double kMassTolerance = 1e-12;

/// Finite probability vector. Construction validates nonnegativity and unit
/// mass (within kMassTolerance); the stored vector is left as given.
class DiscreteDist {
 public:
  DiscreteDist() = default;

  explicit DiscreteDist(std::vector<double> probs) : probs_(std::move(probs)) {
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw DomainError("DiscreteDist: entries must be finite and nonnegative");
      total += p;
    }
    if (probs_.empty() || std::abs(total - 1.0) > kMassTolerance)
      throw DomainError("DiscreteDist: mass " + std::to_string(total) +
                        " is not 1");
  }

  /// Normalizes arbitrary nonnegative weights.
  static DiscreteDist from_weights(std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw DomainError("DiscreteDist::from_weights: invalid weight");
      total += w;
    }
    if (!(total > 0.0))
      throw DegenerateError("DiscreteDist::from_weights: zero total weight");
    for (double& w : weights) w /= total;
    return DiscreteDist(std::move(weights));
  }

  static DiscreteDist uniform(std::size_t k) {
    if (k == 0) throw DomainError("DiscreteDist::uniform: empty support");
    return DiscreteDist(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  static DiscreteDist point_mass(std::size_t k, std::size_t at) {
    if (at >= k) throw ShapeError("DiscreteDist::point_mass: index out of range");
    std::vector<double> p(k, 0.0);
    p[at] = 1.0;
    return DiscreteDist(std::move(p));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  std::span<const double> span() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Joint distribution p(s, w) stored row-major: rows index samples, columns
/// index hypotheses.
class JointTable {
 public:
  JointTable() = default;

  JointTable(std::size_t rows, std::size_t cols, std::vector<double> cells)
      : rows_(rows), cols_(cols), cells_(std::move(cells)) {
    if (rows_ == 0 || cols_ == 0 || cells_.size() != rows_ * cols_)
      throw ShapeError("JointTable: cell count does not match dimensions");
    double total = 0.0;
    for (double p : cells_) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw DomainError("JointTable: entries must be finite and nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > kMassTolerance)
      throw DomainError("JointTable: total mass is not 1");
  }

  /// Joint from a marginal over rows and one conditional row per sample.
  static JointTable from_conditionals(const DiscreteDist& row_marginal,
                                      const std::vector<DiscreteDist>& cond) {
    if (cond.size() != row_marginal.size() || cond.empty())
      throw ShapeError("JointTable::from_conditionals: row count mismatch");
    const std::size_t cols = cond.front().size();
    std::vector<double> cells;
    cells.reserve(cond.size() * cols);
    for (std::size_t s = 0; s < cond.size(); ++s) {
      if (cond[s].size() != cols)
        throw ShapeError("JointTable::from_conditionals: ragged conditionals");
      for (std::size_t w = 0; w < cols; ++w)
        cells.push_back(row_marginal[s] * cond[s][w]);
    }
    return JointTable(cond.size(), cols, std::move(cells));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t s, std::size_t w) const {
    return cells_[s * cols_ + w];
  }
  const std::vector<double>& cells() const { return cells_; }

  std::vector<double> row_marginal() const {
    std::vector<double> m(rows_, 0.0);
    for (std::size_t s = 0; s < rows_; ++s)
      for (std::size_t w = 0; w < cols_; ++w) m[s] += (*this)(s, w);
    return m;
  }

  std::vector<double> col_marginal() const {
    std::vector<double> m(cols_, 0.0);
    for (std::size_t s = 0; s < rows_; ++s)
      for (std::size_t w = 0; w < cols_; ++w) m[w] += (*this)(s, w);
    return m;
  }

  /// P_{W|S=s}; undefined (throws) for zero-probability rows.
  DiscreteDist conditional(std::size_t s) const {
    std::vector<double> row(cells_.begin() + static_cast<std::ptrdiff_t>(s * cols_),
                            cells_.begin() + static_cast<std::ptrdiff_t>((s + 1) * cols_));
    return DiscreteDist::from_weights(std::move(row));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> cells_;
};

/// Joint p(a, b, c) over three finite index sets, stored with c fastest.
/// Used for (supersample, selector, hypothesis) tables.
class JointTable3 {
 public:
  JointTable3(std::size_t na, std::size_t nb, std::size_t nc,
              std::vector<double> cells)
      : na_(na), nb_(nb), nc_(nc), cells_(std::move(cells)) {
    if (na_ == 0 || nb_ == 0 || nc_ == 0 || cells_.size() != na_ * nb_ * nc_)
      throw ShapeError("JointTable3: cell count does not match dimensions");
    double total = 0.0;
    for (double p : cells_) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw DomainError("JointTable3: entries must be finite and nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > kMassTolerance)
      throw DomainError("JointTable3: total mass is not 1");
  }

  std::size_t size_a() const { return na_; }
  std::size_t size_b() const { return nb_; }
  std::size_t size_c() const { return nc_; }
  double operator()(std::size_t a, std::size_t b, std::size_t c) const {
    return cells_[(a * nb_ + b) * nc_ + c];
  }

 private:
  std::size_t na_, nb_, nc_;
  std::vector<double> cells_;
};

}  // namespace infobound
