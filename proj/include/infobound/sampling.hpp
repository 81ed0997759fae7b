#pragma once

// Deterministic random streams and exhaustive sample enumeration.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "infobound/common.hpp"
#include "infobound/distributions.hpp"

namespace infobound {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream keyed by (seed, stream index). Trial t of an experiment
/// always uses stream t, so results do not depend on execution order.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      acc += probs[i];
      last_positive = i;
      if (u < acc) return i;
    }
    return last_positive;
  }

  bool coin() { return (engine_() >> 63) != 0; }

  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline std::vector<std::size_t> draw_sample(StreamRng& rng, const DiscreteDist& mu, std::size_t n) {
  std::vector<std::size_t> s(n);
  for (auto& z : s) z = rng.categorical(mu.span());
  return s;
}

/// |Z|^n, or throws BudgetError when it exceeds `budget`.
inline std::size_t sample_space_size(std::size_t outcomes, std::size_t n, std::size_t budget) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (outcomes != 0 && total > budget / outcomes)
      throw BudgetError("enumeration budget exceeded: |Z|^n > " + std::to_string(budget));
    total *= outcomes;
  }
  if (total > budget)
    throw BudgetError("enumeration budget exceeded: |Z|^n > " + std::to_string(budget));
  return total;
}

/// Decodes sample index `idx` into base-|Z| digits (first position least
/// significant).
inline void decode_sample(std::size_t idx, std::size_t outcomes, std::span<std::size_t> out) {
  for (auto& z : out) {
    z = idx % outcomes;
    idx /= outcomes;
  }
}

/// Calls fn(index, sample, probability) for every sample in Z^n under mu^n.
inline void for_each_sample(
    const DiscreteDist& mu, std::size_t n, std::size_t budget,
    const std::function<void(std::size_t, std::span<const std::size_t>, double)>& fn) {
  const std::size_t k = mu.size();
  const std::size_t total = sample_space_size(k, n, budget);
  std::vector<std::size_t> s(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    decode_sample(idx, k, s);
    double p = 1.0;
    for (std::size_t z : s) p *= mu[z];
    fn(idx, s, p);
  }
}

/// Chernoff/Pinsker deviation for a mean of m draws in [0,1]:
/// sqrt(ln(2/delta') / (2m)).
inline double mc_correction(std::size_t m, double delta_prime) {
  if (m == 0) throw ParameterError("mc_correction: m must be >= 1");
  if (!(delta_prime > 0.0 && delta_prime < 1.0))
    throw ParameterError("mc_correction: delta' must lie in (0,1)");
  return std::sqrt(std::log(2.0 / delta_prime) / (2.0 * static_cast<double>(m)));
}

}  // namespace infobound
