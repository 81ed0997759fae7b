#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "infobound/common.hpp"
#include "infobound/distributions.hpp"

namespace infobound {

/// A learning problem small enough to evaluate exactly: a loss matrix
/// loss(w, z) over finite hypothesis and outcome sets, a data distribution mu
/// over outcomes, and a sample size n.
class FiniteProblem {
 public:
  FiniteProblem(std::vector<std::vector<double>> losses, DiscreteDist mu,
                std::size_t n)
      : losses_(std::move(losses)), mu_(std::move(mu)), n_(n) {
    if (losses_.empty()) throw ShapeError("FiniteProblem: no hypotheses");
    if (n_ == 0) throw DomainError("FiniteProblem: sample size must be >= 1");
    for (const auto& row : losses_) {
      if (row.size() != mu_.size())
        throw ShapeError("FiniteProblem: loss row length differs from |Z|");
      for (double v : row)
        if (!std::isfinite(v))
          throw DomainError("FiniteProblem: loss entries must be finite");
    }
  }

  std::size_t num_hypotheses() const { return losses_.size(); }
  std::size_t num_outcomes() const { return mu_.size(); }
  std::size_t n() const { return n_; }
  const DiscreteDist& mu() const { return mu_; }
  double loss(std::size_t w, std::size_t z) const { return losses_[w][z]; }
  const std::vector<std::vector<double>>& losses() const { return losses_; }

  bool losses_in_unit_interval() const {
    for (const auto& row : losses_)
      for (double v : row)
        if (v < 0.0 || v > 1.0) return false;
    return true;
  }

  bool losses_binary() const {
    for (const auto& row : losses_)
      for (double v : row)
        if (v != 0.0 && v != 1.0) return false;
    return true;
  }

  /// Same losses and mu with a different sample size.
  FiniteProblem with_n(std::size_t n) const { return {losses_, mu_, n}; }

  /// L_S(w) for every w, from a sample of outcome indices (any length >= 1).
  std::vector<double> empirical_risks(std::span<const std::size_t> sample) const {
    if (sample.empty()) throw DomainError("empirical_risks: empty sample");
    std::vector<double> risks(losses_.size(), 0.0);
    for (std::size_t z : sample) {
      if (z >= mu_.size()) throw ShapeError("empirical_risks: outcome out of range");
      for (std::size_t w = 0; w < losses_.size(); ++w) risks[w] += losses_[w][z];
    }
    const double inv = 1.0 / static_cast<double>(sample.size());
    for (double& r : risks) r *= inv;
    return risks;
  }

 private:
  std::vector<std::vector<double>> losses_;
  DiscreteDist mu_;
  std::size_t n_;
};

}  // namespace infobound
