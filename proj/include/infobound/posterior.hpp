#pragma once

// Information complexity minimization. Gibbs posteriors and stochastic
// complexity on finite hypothesis sets; Gaussian posteriors, the Occam bound,
// the PAC-Bayes-SGD objective and local entropy on quadratic models.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "infobound/bounds.hpp"
#include "infobound/cgf.hpp"
#include "infobound/common.hpp"
#include "infobound/distributions.hpp"
#include "infobound/divergences.hpp"
#include "infobound/problem.hpp"
#include "infobound/sampling.hpp"

namespace infobound {

// ---------------------------------------------------------------------------
// Finite hypothesis sets
// ---------------------------------------------------------------------------

/// Gibbs measure P*(w) proportional to exp(-beta f(w)) q(w).
///
/// beta = 0 returns q. beta = +inf returns the uniform distribution over the
/// minimizers of f inside the support of q.
inline DiscreteDist gibbs_posterior(const DiscreteDist& q, std::span<const double> f, double beta) {
  if (f.size() != q.size()) throw ShapeError("gibbs_posterior: f and q lengths differ");
  if (!(beta >= 0.0)) throw DomainError("gibbs_posterior: beta must be nonnegative");
  if (beta == 0.0) return q;

  if (is_infinite(beta)) {
    double best = kInf;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (q[i] > 0.0) best = std::min(best, f[i]);
    if (is_infinite(best)) throw DegenerateError("gibbs_posterior: all prior mass has infinite energy");
    std::vector<double> w(f.size(), 0.0);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (q[i] > 0.0 && f[i] == best) w[i] = 1.0;
    return DiscreteDist::from_weights(std::move(w));
  }

  std::vector<double> logw(f.size(), -kInf);
  double hi = -kInf;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (q[i] > 0.0 && !is_infinite(f[i])) {
      logw[i] = std::log(q[i]) - beta * f[i];
      hi = std::max(hi, logw[i]);
    }
  }
  if (!std::isfinite(hi)) throw DegenerateError("gibbs_posterior: all prior mass has infinite energy");
  std::vector<double> w(f.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    w[i] = std::exp(logw[i] - hi);
    total += w[i];
  }
  for (double& x : w) x /= total;
  // Renormalize through from_weights so the result carries exact unit mass checks.
  return DiscreteDist::from_weights(std::move(w));
}

/// -ln E_q exp(-beta f) / beta.
inline double stochastic_complexity(const DiscreteDist& q, std::span<const double> f, double beta) {
  if (f.size() != q.size()) throw ShapeError("stochastic_complexity: f and q lengths differ");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("stochastic_complexity: beta must be positive");
  // Centre on the q-mean. When beta times the spread is small, log1p/expm1
  // avoids the cancellation of ln(...) / beta.
  double mean = 0.0, spread = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (q[i] > 0.0) {
      finite = finite && std::isfinite(f[i]);
      mean += q[i] * f[i];
    }
  if (finite) {
    for (std::size_t i = 0; i < f.size(); ++i)
      if (q[i] > 0.0) spread = std::max(spread, std::abs(f[i] - mean));
    if (beta * spread < 1.0) {
      double acc = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i)
        if (q[i] > 0.0) acc += q[i] * std::expm1(-beta * (f[i] - mean));
      return mean - std::log1p(acc) / beta;
    }
  }
  std::vector<double> terms;
  terms.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    if (q[i] > 0.0) terms.push_back(std::log(q[i]) - beta * f[i]);
  return -log_sum_exp(terms) / beta;
}

/// E_p f + D(p || q) / beta.
inline double information_complexity(const DiscreteDist& p, const DiscreteDist& q,
                                     std::span<const double> f, double beta) {
  if (f.size() != p.size()) throw ShapeError("information_complexity: lengths differ");
  double mean = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (p[i] > 0.0) mean += p[i] * f[i];
  const double kl = kl_discrete(p, q);
  return is_infinite(kl) ? kInf : mean + kl / beta;
}

struct OicResult {
  DiscreteDist posterior;
  double value = 0.0;
};

/// Optimal information complexity over the full simplex: the Gibbs posterior
/// on L_S at inverse temperature n beta, and its value.
inline OicResult oic(const DiscreteDist& q, const FiniteProblem& problem,
                     std::span<const std::size_t> sample, double beta) {
  if (sample.empty()) throw DomainError("oic: empty sample");
  if (sample.size() != problem.n()) throw ShapeError("oic: sample length differs from n");
  if (q.size() != problem.num_hypotheses()) throw ShapeError("oic: prior size differs from |W|");
  const auto risks = problem.empirical_risks(sample);
  const double temp = static_cast<double>(problem.n()) * beta;
  return {gibbs_posterior(q, risks, temp), stochastic_complexity(q, risks, temp)};
}

/// beta^{-1} D(p || P*) - [E_p f + beta^{-1} D(p || q) + beta^{-1} ln E_q e^{-beta f}].
inline double dv_identity_residual(const DiscreteDist& p, const DiscreteDist& q,
                                   std::span<const double> f, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("dv_identity_residual: beta must be positive");
  const DiscreteDist gibbs = gibbs_posterior(q, f, beta);
  const double lhs = kl_discrete(p, gibbs) / beta;
  const double kl_pq = kl_discrete(p, q);
  if (is_infinite(kl_pq) || is_infinite(lhs)) return kInf;
  double mean = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (p[i] > 0.0) mean += p[i] * f[i];
  const double rhs = mean + kl_pq / beta - stochastic_complexity(q, f, beta);
  return lhs - rhs;
}

/// Maps a training sample (outcome indices) to a posterior over hypotheses.
using PosteriorRule = std::function<DiscreteDist(std::span<const std::size_t>)>;

namespace detail {

/// exp{n beta E_P[M_beta - L_S] - D(P || Q)} for one sample.
inline double iei_term(const FiniteProblem& problem, const std::vector<double>& annealed,
                       const DiscreteDist& posterior, const DiscreteDist& q, double beta,
                       std::span<const std::size_t> sample) {
  const double kl = kl_discrete(posterior, q);
  if (is_infinite(kl)) return 0.0;
  const auto risks = problem.empirical_risks(sample);
  double gap = 0.0;
  for (std::size_t w = 0; w < risks.size(); ++w)
    if (posterior[w] > 0.0) gap += posterior[w] * (annealed[w] - risks[w]);
  return std::exp(static_cast<double>(problem.n()) * beta * gap - kl);
}

inline std::vector<double> annealed_all(const FiniteProblem& problem, double beta) {
  std::vector<double> m(problem.num_hypotheses());
  for (std::size_t w = 0; w < m.size(); ++w) m[w] = annealed_expectation(problem, w, beta);
  return m;
}

}  // namespace detail

struct IeiEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  bool consistent = true;  // mean <= 1 + 3 SE
};

/// Monte Carlo estimate of E_S exp{n beta E_P[M_beta(W) - L_S(W)] - D(P||Q)}.
inline IeiEstimate iei_empirical_check(const FiniteProblem& problem, const PosteriorRule& rule,
                                       const DiscreteDist& q, double beta, std::size_t trials,
                                       std::uint64_t seed) {
  if (trials == 0) throw ParameterError("iei_empirical_check: trials must be >= 1");
  if (!(beta > 0.0)) throw DomainError("iei_empirical_check: beta must be positive");
  const auto annealed = detail::annealed_all(problem, beta);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    StreamRng rng(seed, t);
    const auto sample = draw_sample(rng, problem.mu(), problem.n());
    const double v = detail::iei_term(problem, annealed, rule(sample), q, beta, sample);
    sum += v;
    sum_sq += v * v;
  }
  IeiEstimate est;
  est.trials = trials;
  const double nt = static_cast<double>(trials);
  est.mean = sum / nt;
  const double var = trials > 1 ? std::max(0.0, (sum_sq - nt * est.mean * est.mean) / (nt - 1.0)) : 0.0;
  est.std_error = std::sqrt(var / nt);
  est.consistent = est.mean <= 1.0 + 3.0 * est.std_error;
  return est;
}

/// The same expectation computed exactly by enumerating Z^n.
inline double iei_exact(const FiniteProblem& problem, const PosteriorRule& rule,
                        const DiscreteDist& q, double beta, std::size_t budget = 1'000'000) {
  if (!(beta > 0.0)) throw DomainError("iei_exact: beta must be positive");
  const auto annealed = detail::annealed_all(problem, beta);
  double total = 0.0;
  for_each_sample(problem.mu(), problem.n(), budget,
                  [&](std::size_t, std::span<const std::size_t> s, double p) {
                    if (p > 0.0) total += p * detail::iei_term(problem, annealed, rule(s), q, beta, s);
                  });
  return total;
}

// ---------------------------------------------------------------------------
// Quadratic models with Gaussian posteriors
// ---------------------------------------------------------------------------

/// Quadratic approximation 1/2 (w - w_P)^T H (w - w_P) of the training loss,
/// with H given by its spectrum in the eigenbasis shared with the spherical
/// prior N(w_Q, lambda^{-1} I).
struct QuadraticModel {
  std::vector<double> hessian_eigenvalues;
  std::vector<double> w_p;
  std::vector<double> w_q;
  double lambda = 1.0;
  std::size_t n = 1;
  double beta = 1.0;

  std::size_t k() const { return hessian_eigenvalues.size(); }
  double temperature() const { return static_cast<double>(n) * beta; }

  void validate() const {
    if (w_p.size() != k() || w_q.size() != k())
      throw ShapeError("QuadraticModel: dimension mismatch");
    if (!(lambda > 0.0)) throw DomainError("QuadraticModel: lambda must be positive");
    if (n == 0) throw DomainError("QuadraticModel: n must be >= 1");
    if (!(beta > 0.0)) throw DomainError("QuadraticModel: beta must be positive");
    for (double h : hessian_eigenvalues)
      if (!std::isfinite(h) || !(temperature() * h + lambda > 0.0))
        throw DomainError("QuadraticModel: n beta H + lambda I is not positive definite");
  }

  /// Eigenvalues lambda_i of H_lambda = n beta H + lambda I.
  std::vector<double> posterior_precision() const {
    std::vector<double> out(k());
    for (std::size_t i = 0; i < k(); ++i) out[i] = temperature() * hessian_eigenvalues[i] + lambda;
    return out;
  }

  double mean_gap_sq() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < k(); ++i) acc += (w_q[i] - w_p[i]) * (w_q[i] - w_p[i]);
    return acc;
  }
};

/// Spectrum of the optimal posterior covariance H_lambda^{-1}.
inline std::vector<double> optimal_gaussian_covariance(const QuadraticModel& model) {
  model.validate();
  auto prec = model.posterior_precision();
  for (double& p : prec) p = 1.0 / p;
  return prec;
}

/// E_P[1/2 theta^T H theta] = 1/2 tr(H Sigma) for a covariance co-diagonal with H.
inline double expected_quadratic_loss(const QuadraticModel& model, std::span<const double> cov) {
  if (cov.size() != model.k()) throw ShapeError("expected_quadratic_loss: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < cov.size(); ++i) {
    if (!(cov[i] >= 0.0)) throw DomainError("expected_quadratic_loss: variances must be nonnegative");
    acc += model.hessian_eigenvalues[i] * cov[i];
  }
  return 0.5 * acc;
}

/// ICM objective E_P[L~_S] + (n beta)^{-1} D(P || Q) for P = N(w_P, diag cov).
inline double gaussian_icm_objective(const QuadraticModel& model, std::span<const double> cov) {
  model.validate();
  const std::vector<double> q_var(model.k(), 1.0 / model.lambda);
  const double kl = kl_gaussian_diag(model.w_p, cov, model.w_q, q_var);
  return expected_quadratic_loss(model, cov) + kl / model.temperature();
}

struct OccamBound {
  BoundResult bound;
  double occam_factor = 1.0;  // exp(-1/2 sum ln(lambda_i / lambda))
  double kl_exact = 0.0;      // exact D(P || Q) of the Gaussian pair
};

/// Curvature-aware bound on E_P[M_beta] for P = N(w_P, H_lambda^{-1}):
/// L_S + ln(1/delta)/(n beta) + (lambda ||w_Q - w_P||^2 / 2 + 1/2 sum ln(lambda_i/lambda)) / (n beta).
inline OccamBound occam_bound(const QuadraticModel& model, double delta, double empirical_risk) {
  model.validate();
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError("occam_bound: delta must lie in (0,1]");
  const auto prec = model.posterior_precision();
  double log_det_ratio = 0.0;
  for (double li : prec) {
    if (li < model.lambda) throw DomainError("occam_bound: requires lambda_i >= lambda");
    log_det_ratio += std::log(li / model.lambda);
  }
  const double scale = model.temperature();
  OccamBound out;
  out.bound = detail::additive({{"empirical_risk", empirical_risk},
                                {"confidence", std::log(1.0 / delta) / scale},
                                {"mean_shift", model.lambda * model.mean_gap_sq() / 2.0 / scale},
                                {"log_occam", 0.5 * log_det_ratio / scale}},
                               model.beta, false);
  out.occam_factor = std::exp(-0.5 * log_det_ratio);
  out.kl_exact = kl_gaussian_spectral({model.mean_gap_sq(), prec, model.lambda});
  return out;
}

struct PacBayesSgdParams {
  double alpha = 2.0;
  std::size_t b = 100;      // lambda-grid resolution
  double c = 0.1;           // lambda-grid scale
  std::size_t m = 1000;     // Monte Carlo draws behind mc_empirical_risk
  double delta = 0.05;
  double delta_prime = 0.05;
  std::size_t n = 1;
  double beta = 2.0;
  double lambda = 0.01;
  double mc_empirical_risk = 0.0;
  double kl = 0.0;
};

/// Catoni bound made uniform over beta > 1 and a geometric lambda grid, with a
/// Monte Carlo estimate of the empirical risk:
/// Phi_beta^{-1}{ L^_S + alpha kl / (n beta) + R }.
inline BoundResult pacbayes_sgd_objective(const PacBayesSgdParams& p) {
  if (!(p.alpha > 1.0)) throw ParameterError("pacbayes_sgd_objective: alpha must exceed 1");
  if (!(p.beta > 1.0)) throw ParameterError("pacbayes_sgd_objective: beta must exceed 1");
  if (!(p.c > 0.0 && p.c < 1.0)) throw ParameterError("pacbayes_sgd_objective: c must lie in (0,1)");
  if (!(p.lambda > 0.0 && p.lambda < p.c))
    throw ParameterError("pacbayes_sgd_objective: lambda must lie in (0,c)");
  if (p.b == 0 || p.m == 0 || p.n == 0)
    throw ParameterError("pacbayes_sgd_objective: b, m and n must be >= 1");
  if (!(p.delta > 0.0 && p.delta < 1.0) || !(p.delta_prime > 0.0 && p.delta_prime < 1.0))
    throw ParameterError("pacbayes_sgd_objective: delta and delta' must lie in (0,1)");
  if (!(p.kl >= 0.0)) throw ParameterError("pacbayes_sgd_objective: kl must be nonnegative");

  const double nn = static_cast<double>(p.n);
  const double scale = p.alpha / (nn * p.beta);
  const double bb = static_cast<double>(p.b);
  const double log_grid = std::log(p.c / p.lambda);
  const double beta_cost =
      2.0 * scale * std::log(std::log(p.alpha * p.alpha * p.beta * nn) / std::log(p.alpha));
  const double lambda_cost =
      scale * std::log(std::numbers::pi * std::numbers::pi * bb * bb / (6.0 * p.delta) * log_grid * log_grid);
  const double mc_cost = mc_correction(p.m, p.delta_prime);

  BoundResult r;
  r.components = {{"mc_empirical_risk", p.mc_empirical_risk},
                  {"complexity", is_infinite(p.kl) ? kInf : scale * p.kl},
                  {"beta_grid", beta_cost},
                  {"lambda_grid", lambda_cost},
                  {"monte_carlo", mc_cost}};
  r.composition = Composition::kPhiInverse;
  r.beta_used = p.beta;
  const auto inv = phi_beta_inverse(p.beta, r.component_sum());
  r.raw_value = inv.value;
  r.vacuous = inv.vacuous;
  detail::clamp_unit(r);
  return r;
}

/// Reparameterized Monte Carlo estimate of E_P[L~_S] for P = N(w_P + shift, diag cov).
inline double mc_quadratic_risk(const QuadraticModel& model, std::span<const double> cov,
                                std::size_t draws, std::uint64_t seed) {
  if (cov.size() != model.k()) throw ShapeError("mc_quadratic_risk: dimension mismatch");
  if (draws == 0) throw ParameterError("mc_quadratic_risk: draws must be >= 1");
  StreamRng rng(seed, 0);
  double acc = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    double loss = 0.0;
    for (std::size_t i = 0; i < model.k(); ++i) {
      const double theta = rng.normal() * std::sqrt(cov[i]);
      loss += 0.5 * model.hessian_eigenvalues[i] * theta * theta;
    }
    acc += loss;
  }
  return acc / static_cast<double>(draws);
}

/// Local entropy -beta^{-1} ln int exp(-beta [L~_S(w') + gamma/2 ||w - w'||^2]) dw'
/// of the quadratic loss, evaluated at w (default w_P). The Gaussian
/// normalization is kept in full, so at w = w_P the value is
/// -beta^{-1} sum_i 1/2 ln(2 pi / (beta (h_i + gamma))). Here beta is
/// model.beta.
inline double local_entropy(const QuadraticModel& model, double gamma,
                            std::span<const double> w = {}) {
  model.validate();
  if (!(gamma > 0.0)) throw DomainError("local_entropy: gamma must be positive");
  if (!w.empty() && w.size() != model.k()) throw ShapeError("local_entropy: dimension mismatch");
  const double beta = model.beta;
  double acc = 0.0;
  for (std::size_t i = 0; i < model.k(); ++i) {
    const double h = model.hessian_eigenvalues[i];
    if (!(h + gamma > 0.0)) throw DomainError("local_entropy: h_i + gamma must be positive");
    const double d = w.empty() ? 0.0 : w[i] - model.w_p[i];
    acc += 0.5 * h * gamma / (h + gamma) * d * d -
           0.5 * std::log(2.0 * std::numbers::pi / (beta * (h + gamma))) / beta;
  }
  return acc;
}

struct MonteCarloValue {
  double value = 0.0;
  double std_error = 0.0;
};

/// Importance-sampling estimate of local_entropy from N(w, (beta gamma)^{-1} I).
inline MonteCarloValue local_entropy_mc(const QuadraticModel& model, double gamma, std::size_t draws,
                                        std::uint64_t seed, std::span<const double> w = {}) {
  model.validate();
  if (!(gamma > 0.0)) throw DomainError("local_entropy_mc: gamma must be positive");
  if (draws < 2) throw ParameterError("local_entropy_mc: needs at least two draws");
  const std::size_t k = model.k();
  const double beta = model.beta;
  const double sd = 1.0 / std::sqrt(beta * gamma);
  StreamRng rng(seed, 0);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    double loss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double centre = w.empty() ? model.w_p[i] : w[i];
      const double theta = centre + sd * rng.normal() - model.w_p[i];
      loss += 0.5 * model.hessian_eigenvalues[i] * theta * theta;
    }
    const double v = std::exp(-beta * loss);
    sum += v;
    sum_sq += v * v;
  }
  const double nd = static_cast<double>(draws);
  const double mean = sum / nd;
  const double var = std::max(0.0, (sum_sq - nd * mean * mean) / (nd - 1.0));
  const double log_norm = 0.5 * static_cast<double>(k) * std::log(2.0 * std::numbers::pi / (beta * gamma));
  MonteCarloValue out;
  out.value = -(log_norm + std::log(mean)) / beta;
  out.std_error = std::sqrt(var / nd) / mean / beta;  // delta method
  return out;
}

}  // namespace infobound
