#pragma once

// Random instance generators shared by the test binaries.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "infobound/infobound.hpp"

namespace testing_support {

using infobound::DiscreteDist;
using infobound::FiniteProblem;
using infobound::JointTable;

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t k, double zero_prob = 0.0) {
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) {
    x = u(rng) < zero_prob ? 0.0 : ex(rng);
    total += x;
  }
  if (total == 0.0) w[0] = 1.0;
  return w;
}

inline DiscreteDist random_dist(std::mt19937_64& rng, std::size_t k, double zero_prob = 0.0) {
  return DiscreteDist::from_weights(random_weights(rng, k, zero_prob));
}

inline JointTable random_joint(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                               double zero_prob = 0.0) {
  auto w = random_weights(rng, rows * cols, zero_prob);
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return JointTable(rows, cols, std::move(w));
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t k, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(k);
  for (auto& x : v) x = u(rng);
  return v;
}

/// Random loss matrix in [0,1] (binary when `binary`).
inline FiniteProblem random_problem(std::mt19937_64& rng, std::size_t hyps, std::size_t outcomes,
                                    std::size_t n, bool binary = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> losses(hyps, std::vector<double>(outcomes));
  for (auto& row : losses)
    for (auto& x : row) x = binary ? (u(rng) < 0.5 ? 0.0 : 1.0) : u(rng);
  return FiniteProblem(std::move(losses), random_dist(rng, outcomes), n);
}

}  // namespace testing_support
