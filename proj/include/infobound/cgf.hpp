#pragma once

// Cumulant generating function toolbox: closed-form CGF bounds psi for the
// supported loss families, their Legendre-dual inverses, the Bernoulli
// transform Phi_beta and the annealed expectation M_beta.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "infobound/common.hpp"
#include "infobound/problem.hpp"

namespace infobound {

struct Bernoulli01 {};
struct BoundedUnit {};

struct SubGaussian {
  double sigma = 1.0;
};

struct SubGamma {
  double sigma = 1.0;
  double c = 0.0;
};

/// Loss family; fixes which psi closed form applies.
using LossModel = std::variant<Bernoulli01, BoundedUnit, SubGaussian, SubGamma>;

inline void validate(const LossModel& model) {
  if (const auto* g = std::get_if<SubGaussian>(&model)) {
    if (!(g->sigma > 0.0) || !std::isfinite(g->sigma))
      throw DomainError("SubGaussian: sigma must be positive");
  } else if (const auto* m = std::get_if<SubGamma>(&model)) {
    if (!(m->sigma > 0.0) || !std::isfinite(m->sigma))
      throw DomainError("SubGamma: sigma must be positive");
    if (!(m->c >= 0.0) || !std::isfinite(m->c))
      throw DomainError("SubGamma: c must be nonnegative");
  }
}

/// Losses valued in [0,1] (and therefore 1/2-sub-Gaussian by Hoeffding's lemma).
inline bool is_unit_interval(const LossModel& model) {
  return std::holds_alternative<Bernoulli01>(model) ||
         std::holds_alternative<BoundedUnit>(model);
}

/// Sub-Gaussian scale of the model; bounded losses use 1/2.
inline double sigma_of(const LossModel& model) {
  if (const auto* g = std::get_if<SubGaussian>(&model)) return g->sigma;
  if (const auto* m = std::get_if<SubGamma>(&model)) return m->sigma;
  return 0.5;
}

inline double c_of(const LossModel& model) {
  if (const auto* m = std::get_if<SubGamma>(&model)) return m->c;
  return 0.0;
}

/// Upper end b of the admissible beta domain (0, b).
inline double beta_domain_upper(const LossModel& model) {
  const double c = c_of(model);
  return c > 0.0 ? 1.0 / c : kInf;
}

inline std::string model_name(const LossModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Bernoulli01>) return "bernoulli01";
        else if constexpr (std::is_same_v<T, BoundedUnit>) return "bounded_unit";
        else if constexpr (std::is_same_v<T, SubGaussian>) return "sub_gaussian";
        else return "sub_gamma";
      },
      model);
}

inline double psi_of(const LossModel& model, double beta) {
  validate(model);
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw DomainError("psi_of: beta must be a nonnegative real");
  const double sigma = sigma_of(model);
  const double c = c_of(model);
  if (c > 0.0 && beta * c >= 1.0)
    throw DomainError("psi_of: beta outside (0, 1/c) for sub-gamma model");
  const double quad = 0.5 * beta * beta * sigma * sigma;
  return c > 0.0 ? quad / (1.0 - c * beta) : quad;
}

/// Closed-form generalized inverse of the Legendre dual psi*.
inline double psi_star_inverse(const LossModel& model, double y) {
  validate(model);
  if (!(y >= 0.0)) throw DomainError("psi_star_inverse: y must be nonnegative");
  if (is_infinite(y)) return kInf;
  const double sigma = sigma_of(model);
  return std::sqrt(2.0 * sigma * sigma * y) + c_of(model) * y;
}

/// User-supplied convex psi with psi(0) = psi'(0) = 0 on [0, upper).
struct PsiFunction {
  std::function<double(double)> evaluator;
  double upper = kInf;
};

inline PsiFunction psi_function(const LossModel& model) {
  return {[model](double beta) { return psi_of(model, beta); },
          beta_domain_upper(model)};
}

/// psi*^{-1}(y) = inf_{beta in (0,b)} (y + psi(beta)) / beta, located by a
/// 64-point logarithmic scan followed by golden-section refinement.
inline double psi_star_inverse_numeric(const PsiFunction& psi, double y) {
  if (!(y >= 0.0)) throw DomainError("psi_star_inverse_numeric: y must be nonnegative");
  if (!(psi.upper > 0.0)) throw DomainError("psi_star_inverse_numeric: empty domain");
  if (y == 0.0) return 0.0;
  if (is_infinite(y)) return kInf;

  const auto objective = [&](double beta) {
    const double v = psi.evaluator(beta);
    if (!std::isfinite(v))
      throw EvaluationError("psi evaluator returned a non-finite value inside its domain");
    return (y + v) / beta;
  };

  constexpr int kScan = 64;
  const double hi = std::min(psi.upper, 1e8);
  const double lo = hi * 1e-16;
  const double ratio = std::pow(hi / lo, 1.0 / kScan);
  std::vector<double> grid(kScan);
  std::vector<double> vals(kScan);
  std::size_t best = 0;
  for (int j = 0; j < kScan; ++j) {
    grid[j] = lo * std::pow(ratio, j);
    vals[j] = objective(grid[j]);
    if (vals[j] < vals[best]) best = static_cast<std::size_t>(j);
  }
  double a = best == 0 ? lo : grid[best - 1];
  double b = best + 1 == kScan ? hi : grid[best + 1];

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(x2);
    }
  }
  return std::min({f1, f2, vals[best]});
}

/// Phi_beta(x) = -ln(1 - (1 - e^{-beta}) x) / beta.
inline double phi_beta(double beta, double x) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("phi_beta: beta must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("phi_beta: x must lie in [0,1]");
  return -std::log1p(std::expm1(-beta) * x) / beta;
}

struct PhiInverse {
  double value = 0.0;
  bool vacuous = false;  // value exceeds 1
};

/// Phi_beta^{-1}(x) = (1 - e^{-beta x}) / (1 - e^{-beta}); raw value, flagged
/// when above 1.
inline PhiInverse phi_beta_inverse(double beta, double x) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("phi_beta_inverse: beta must be positive");
  if (std::isnan(x)) throw DomainError("phi_beta_inverse: x is NaN");
  if (is_infinite(x)) {
    return {1.0 / -std::expm1(-beta), true};
  }
  const double v = std::expm1(-beta * x) / std::expm1(-beta);
  return {v, v > 1.0};
}

/// M_beta(w) = -ln E_mu exp(-beta loss(w, Z)) / beta, exact.
inline double annealed_expectation(const FiniteProblem& problem, std::size_t w,
                                   double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("annealed_expectation: beta must be positive");
  if (problem.num_outcomes() == 0) throw DomainError("annealed_expectation: empty outcome space");
  if (w >= problem.num_hypotheses()) throw ShapeError("annealed_expectation: bad hypothesis index");
  std::vector<double> terms;
  terms.reserve(problem.num_outcomes());
  for (std::size_t z = 0; z < problem.num_outcomes(); ++z) {
    const double m = problem.mu()[z];
    if (m > 0.0) terms.push_back(std::log(m) - beta * problem.loss(w, z));
  }
  return -log_sum_exp(terms) / beta;
}

}  // namespace infobound
