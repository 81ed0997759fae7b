#pragma once

// Closed-form PAC-Bayesian and information-theoretic generalization bounds.
//
// Every high-probability bound takes a BoundRequest whose beta and delta must
// be fixed before the sample is drawn. union_bound_beta is the only bound that
// picks beta itself, and it pays for that through a union bound over a grid.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infobound/cgf.hpp"
#include "infobound/common.hpp"
#include "infobound/divergences.hpp"

namespace infobound {

struct BoundRequest {
  std::size_t n = 1;
  double delta = 1.0;
  std::optional<double> beta;
  double empirical_risk = 0.0;  // E_P[L_S(W)]
  double kl = 0.0;              // D(P || Q), may be +inf
  LossModel model = BoundedUnit{};
};

struct BoundComponent {
  std::string name;
  double value = 0.0;
};

/// How `value` is obtained from the components.
enum class Composition {
  kSum,              // value = sum of components
  kPhiInverse,       // value = Phi_beta^{-1}(sum of components)
  kScaledSum,        // value = prefactor * sum of components
  kKlInverse,        // value = kl^{-1}(empirical_risk, radius)
  kQuadraticInverse, // value = y + sqrt(r/2)
  kNormalizedInverse // value = y + r + sqrt(r^2 + 2 y r)
};

struct BoundResult {
  double value = 0.0;      // reported bound (clamped to 1 where applicable)
  double raw_value = 0.0;  // composition of the components before clamping
  std::vector<BoundComponent> components;
  Composition composition = Composition::kSum;
  double prefactor = 1.0;  // only for kScaledSum
  bool vacuous = false;
  double beta_used = 0.0;
  bool confidence_clamped = false;  // delta > 1 was requested and clamped

  double component(const std::string& name) const {
    for (const auto& c : components)
      if (c.name == name) return c.value;
    throw ParameterError("BoundResult: no component named " + name);
  }

  double component_sum() const {
    double acc = 0.0;
    for (const auto& c : components) acc += c.value;
    return acc;
  }
};

namespace detail {

inline void check_common(const BoundRequest& req, bool allow_large_delta = false) {
  if (req.n == 0) throw ParameterError("bound request: n must be >= 1");
  if (!(req.delta > 0.0) || (!allow_large_delta && req.delta > 1.0))
    throw ParameterError("bound request: delta must lie in (0, 1]");
  if (!(req.kl >= 0.0)) throw ParameterError("bound request: kl must be nonnegative");
  if (std::isnan(req.empirical_risk)) throw ParameterError("bound request: empirical risk is NaN");
  validate(req.model);
}

inline double require_beta(const BoundRequest& req) {
  if (!req.beta) throw ParameterError("bound request: beta is required");
  const double beta = *req.beta;
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw ParameterError("bound request: beta must be a positive real");
  return beta;
}

inline void require_unit_loss(const BoundRequest& req, const char* who) {
  if (!is_unit_interval(req.model))
    throw ParameterError(std::string(who) + ": requires a [0,1]-valued loss model");
}

inline double nd(std::size_t n) { return static_cast<double>(n); }

// (kl + penalty) / scale with +inf kept as +inf.
inline double complexity(double kl, double scale) {
  return is_infinite(kl) ? kInf : kl / scale;
}

/// Additive result; vacuous when infinite or, for [0,1] losses, above 1.
inline BoundResult additive(std::vector<BoundComponent> comps, double beta,
                            bool unit_range) {
  BoundResult r;
  r.components = std::move(comps);
  r.composition = Composition::kSum;
  r.raw_value = r.component_sum();
  r.value = r.raw_value;
  r.beta_used = beta;
  r.vacuous = is_infinite(r.value) || (unit_range && r.value > 1.0);
  return r;
}

inline void clamp_unit(BoundResult& r) {
  r.vacuous = r.vacuous || is_infinite(r.raw_value) || r.raw_value > 1.0;
  r.value = std::min(r.raw_value, 1.0);
}

}  // namespace detail

/// Bound on E_P[M_beta(W)]: L_S + (kl + ln 1/delta) / (n beta).
inline BoundResult zhang_high_prob(const BoundRequest& req) {
  detail::check_common(req);
  const double beta = detail::require_beta(req);
  const double scale = detail::nd(req.n) * beta;
  return detail::additive(
      {{"IC", req.empirical_risk + detail::complexity(req.kl, scale)},
       {"confidence", std::log(1.0 / req.delta) / scale}},
      beta, is_unit_interval(req.model));
}

/// Bound on E_P[g(W,S)]: (kl + ln 1/delta) / (n beta) + psi(beta) / beta.
inline BoundResult zhang_gen_high_prob(const BoundRequest& req) {
  detail::check_common(req);
  const double beta = detail::require_beta(req);
  const double cgf = psi_of(req.model, beta) / beta;
  const double scale = detail::nd(req.n) * beta;
  return detail::additive({{"complexity", detail::complexity(req.kl, scale)},
                           {"confidence", std::log(1.0 / req.delta) / scale},
                           {"cgf", cgf}},
                          beta, is_unit_interval(req.model));
}

/// E[g] <= psi*^{-1}(avg_kl / n), avg_kl = D(P_{W|S} || Q | P_S).
inline double zhang_gen_expectation(double avg_kl, std::size_t n, const LossModel& model) {
  if (!(avg_kl >= 0.0)) throw ParameterError("zhang_gen_expectation: avg_kl must be nonnegative");
  if (n == 0) throw ParameterError("zhang_gen_expectation: n must be >= 1");
  return psi_star_inverse(model, avg_kl / detail::nd(n));
}

/// sqrt(2 sigma^2 I / n).
inline double xu_raginsky(double mi, std::size_t n, double sigma) {
  if (!(mi >= 0.0)) throw ParameterError("xu_raginsky: mi must be nonnegative");
  if (n == 0) throw ParameterError("xu_raginsky: n must be >= 1");
  if (!(sigma > 0.0)) throw ParameterError("xu_raginsky: sigma must be positive");
  return std::sqrt(2.0 * sigma * sigma * mi / detail::nd(n));
}

/// sqrt(2 sigma^2 I / n) + c I / n.
inline double subgamma_mi(double mi, std::size_t n, double sigma, double c) {
  if (!(c >= 0.0)) throw ParameterError("subgamma_mi: c must be nonnegative");
  return xu_raginsky(mi, n, sigma) + c * mi / detail::nd(n);
}

/// beta = 1 specialization for (sigma, c)-sub-gamma losses with c < 1.
inline BoundResult subgamma_pacbayes(const BoundRequest& req) {
  detail::check_common(req);
  const auto* sg = std::get_if<SubGamma>(&req.model);
  if (!sg) throw ParameterError("subgamma_pacbayes: requires a sub-gamma loss model");
  if (!(sg->c < 1.0)) throw ParameterError("subgamma_pacbayes: requires c < 1");
  const double nn = detail::nd(req.n);
  return detail::additive({{"complexity", detail::complexity(req.kl, nn)},
                           {"confidence", std::log(1.0 / req.delta) / nn},
                           {"cgf", sg->sigma * sg->sigma / (2.0 * (1.0 - sg->c))}},
                          1.0, false);
}

/// Constant K = max{log_alpha(v sigma / sqrt(2 alpha)), 0} + e.
inline double union_bound_constant(double alpha, double v, double sigma) {
  return std::max(std::log(v * sigma / std::sqrt(2.0 * alpha)) / std::log(alpha), 0.0) +
         std::numbers::e;
}

/// beta-uniform bound for sub-Gaussian losses, minimized over beta in (0, v].
/// The objective (alpha/(n beta)) J + beta sigma^2 / 2 has the unconstrained
/// minimizer sqrt(2 alpha J / (n sigma^2)), clipped to v.
inline BoundResult union_bound_beta(const BoundRequest& req, double alpha, double v) {
  detail::check_common(req);
  if (!(alpha > 1.0)) throw ParameterError("union_bound_beta: alpha must exceed 1");
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("union_bound_beta: v must be positive");
  if (std::holds_alternative<SubGamma>(req.model))
    throw ParameterError("union_bound_beta: requires a sub-Gaussian or bounded loss model");
  const double sigma = sigma_of(req.model);
  const double nn = detail::nd(req.n);
  const double k = union_bound_constant(alpha, v, sigma);
  const double grid_cost = std::log((std::log(std::sqrt(nn)) / std::log(alpha) + k) / req.delta);
  const double j = is_infinite(req.kl) ? kInf : req.kl + grid_cost;
  double beta = is_infinite(j) ? v : std::sqrt(2.0 * alpha * j / (nn * sigma * sigma));
  beta = std::min(beta, v);
  const double scale = alpha / (nn * beta);
  return detail::additive({{"complexity", detail::complexity(req.kl, 1.0 / scale)},
                           {"confidence", grid_cost * scale},
                           {"cgf", beta * sigma * sigma / 2.0}},
                          beta, is_unit_interval(req.model));
}

/// Catoni: E_P[L_mu] <= Phi_beta^{-1}(L_S + (kl + ln 1/delta)/(n beta)).
inline BoundResult catoni_bound(const BoundRequest& req) {
  detail::check_common(req);
  detail::require_unit_loss(req, "catoni_bound");
  const double beta = detail::require_beta(req);
  const double scale = detail::nd(req.n) * beta;
  BoundResult r;
  r.components = {{"IC", req.empirical_risk + detail::complexity(req.kl, scale)},
                  {"confidence", std::log(1.0 / req.delta) / scale}};
  r.composition = Composition::kPhiInverse;
  r.beta_used = beta;
  const auto inv = phi_beta_inverse(beta, r.component_sum());
  r.raw_value = inv.value;
  r.vacuous = inv.vacuous;
  detail::clamp_unit(r);
  return r;
}

namespace detail {

inline BoundResult linear_catoni_family(const BoundRequest& req, double prefactor) {
  const double beta = *req.beta;
  const double scale = nd(req.n) * beta;
  BoundResult r;
  r.components = {{"IC", req.empirical_risk + complexity(req.kl, scale)},
                  {"confidence", std::log(1.0 / req.delta) / scale}};
  r.composition = Composition::kScaledSum;
  r.prefactor = prefactor;
  r.beta_used = beta;
  r.raw_value = prefactor * r.component_sum();
  clamp_unit(r);
  return r;
}

}  // namespace detail

/// (beta / (1 - e^{-beta})) [L_S + (kl + ln 1/delta)/(n beta)].
inline BoundResult catoni_linear(const BoundRequest& req) {
  detail::check_common(req);
  detail::require_unit_loss(req, "catoni_linear");
  const double beta = detail::require_beta(req);
  return detail::linear_catoni_family(req, beta / -std::expm1(-beta));
}

/// (1 / (1 - beta/2)) [L_S + (kl + ln 1/delta)/(n beta)], beta < 2.
inline BoundResult mcallester_linear(const BoundRequest& req) {
  detail::check_common(req);
  detail::require_unit_loss(req, "mcallester_linear");
  const double beta = detail::require_beta(req);
  if (!(beta < 2.0)) throw ParameterError("mcallester_linear: requires beta < 2");
  return detail::linear_catoni_family(req, 1.0 / (1.0 - beta / 2.0));
}

/// PAC-Bayes-kl with Maurer's 2 sqrt(n) moment bound, n >= 8. A delta above
/// 1 is clamped to 1 and flagged.
inline BoundResult pac_bayes_kl(const BoundRequest& req) {
  detail::check_common(req, /*allow_large_delta=*/true);
  detail::require_unit_loss(req, "pac_bayes_kl");
  if (req.n < 8) throw ParameterError("pac_bayes_kl: requires n >= 8");
  if (!(req.empirical_risk >= 0.0 && req.empirical_risk <= 1.0))
    throw ParameterError("pac_bayes_kl: empirical risk must lie in [0,1]");
  const double nn = detail::nd(req.n);
  BoundResult r;
  r.beta_used = 1.0;
  const double delta = std::min(req.delta, 1.0);
  r.confidence_clamped = req.delta > 1.0;
  const double radius = detail::complexity(req.kl, nn) + std::log(2.0 * std::sqrt(nn) / delta) / nn;
  r.components = {{"empirical_risk", req.empirical_risk}, {"radius", radius}};
  r.composition = Composition::kKlInverse;
  r.raw_value = kl_binary_inverse_upper(req.empirical_risk, radius);
  r.value = r.raw_value;
  r.vacuous = is_infinite(radius);
  return r;
}

enum class DeltaFunction { kKl, kQuadratic, kNormalized };

inline DeltaFunction parse_delta_function(const std::string& name) {
  if (name == "kl") return DeltaFunction::kKl;
  if (name == "quadratic") return DeltaFunction::kQuadratic;
  if (name == "normalized") return DeltaFunction::kNormalized;
  throw ParameterError("unknown Delta-function variant: " + name);
}

/// Bound from a convex comparator Delta: sup{x : Delta(L_S, x) <= r} with
/// r = (kl + ln 1/delta + moment_bound) / n, where moment_bound is the caller's
/// value of ln E_Q E_S' exp(n Delta).
inline BoundResult delta_bound(const BoundRequest& req, DeltaFunction fn, double moment_bound) {
  detail::check_common(req);
  if (!(req.empirical_risk >= 0.0 && req.empirical_risk <= 1.0))
    throw ParameterError("delta_bound: empirical risk must lie in [0,1]");
  if (std::isnan(moment_bound)) throw ParameterError("delta_bound: moment bound is NaN");
  const double nn = detail::nd(req.n);
  const double y = req.empirical_risk;
  const double radius =
      std::max(0.0, detail::complexity(req.kl, nn) + (std::log(1.0 / req.delta) + moment_bound) / nn);
  BoundResult r;
  r.components = {{"empirical_risk", y}, {"radius", radius}};
  r.beta_used = 1.0;
  switch (fn) {
    case DeltaFunction::kKl:
      r.composition = Composition::kKlInverse;
      r.raw_value = kl_binary_inverse_upper(y, radius);
      break;
    case DeltaFunction::kQuadratic:
      r.composition = Composition::kQuadraticInverse;
      r.raw_value = y + std::sqrt(radius / 2.0);
      break;
    case DeltaFunction::kNormalized:
      r.composition = Composition::kNormalizedInverse;
      r.raw_value = y + radius + std::sqrt(radius * radius + 2.0 * y * radius);
      break;
  }
  r.vacuous = is_infinite(radius);
  detail::clamp_unit(r);
  return r;
}

/// CMI PAC-Bayes bound on E_P[g(W, Z~, U)]: (kl + ln 1/delta)/(n beta) + beta/2.
inline BoundResult cmi_pac_high_prob(const BoundRequest& req) {
  detail::check_common(req);
  detail::require_unit_loss(req, "cmi_pac_high_prob");
  const double beta = detail::require_beta(req);
  const double scale = detail::nd(req.n) * beta;
  return detail::additive({{"complexity", detail::complexity(req.kl, scale)},
                           {"confidence", std::log(1.0 / req.delta) / scale},
                           {"hoeffding", beta / 2.0}},
                          beta, true);
}

/// sqrt(2 x / n) where x is D(P || Q | P_{Z~U}) or, with the oracle prior, CMI.
inline double cmi_expectation(double avg_kl_or_cmi, std::size_t n) {
  if (!(avg_kl_or_cmi >= 0.0)) throw ParameterError("cmi_expectation: input must be nonnegative");
  if (n == 0) throw ParameterError("cmi_expectation: n must be >= 1");
  return std::sqrt(2.0 * avg_kl_or_cmi / detail::nd(n));
}

/// Fano lower bound on the error of identifying U from (W, Z~).
inline double fano_identification_lb(double cmi, std::size_t n) {
  if (!(cmi >= 0.0)) throw ParameterError("fano_identification_lb: cmi must be nonnegative");
  if (n == 0) throw ParameterError("fano_identification_lb: n must be >= 1");
  return std::max(0.0, 1.0 - (cmi + kLn2) / (detail::nd(n) * kLn2));
}

/// f_n(delta, eps) = ln(2/delta) + n eps^2/2 + eps sqrt((n/2) ln(4/delta)).
inline double dp_prior_penalty(double delta, double epsilon, std::size_t n) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError("dp_prior_penalty: delta must lie in (0,1]");
  if (!(epsilon >= 0.0)) throw ParameterError("dp_prior_penalty: epsilon must be nonnegative");
  const double nn = detail::nd(n);
  return std::log(2.0 / delta) + nn * epsilon * epsilon / 2.0 +
         epsilon * std::sqrt(nn / 2.0 * std::log(4.0 / delta));
}

/// Bound on E_P[M_beta] with an epsilon-DP data-dependent prior Q0(S); kl is
/// D(P || Q0(S)).
inline BoundResult dp_prior_high_prob(const BoundRequest& req, double epsilon) {
  detail::check_common(req);
  const double beta = detail::require_beta(req);
  const double scale = detail::nd(req.n) * beta;
  return detail::additive(
      {{"IC", req.empirical_risk + detail::complexity(req.kl, scale)},
       {"privacy_confidence", dp_prior_penalty(req.delta, epsilon, req.n) / scale}},
      beta, is_unit_interval(req.model));
}

/// Generalization-error version with the psi(beta)/beta term.
inline BoundResult dp_prior_gen_bound(const BoundRequest& req, double epsilon) {
  detail::check_common(req);
  const double beta = detail::require_beta(req);
  const double scale = detail::nd(req.n) * beta;
  return detail::additive(
      {{"complexity", detail::complexity(req.kl, scale)},
       {"privacy_confidence", dp_prior_penalty(req.delta, epsilon, req.n) / scale},
       {"cgf", psi_of(req.model, beta) / beta}},
      beta, is_unit_interval(req.model));
}

/// Re-evaluates `value` from the components; used to check the breakdown.
inline double recompose(const BoundResult& r) {
  const double sum = r.component_sum();
  double raw = 0.0;
  switch (r.composition) {
    case Composition::kSum: raw = sum; break;
    case Composition::kScaledSum: raw = r.prefactor * sum; break;
    case Composition::kPhiInverse: raw = phi_beta_inverse(r.beta_used, sum).value; break;
    case Composition::kKlInverse:
      raw = kl_binary_inverse_upper(r.component("empirical_risk"), r.component("radius"));
      break;
    case Composition::kQuadraticInverse:
      raw = r.component("empirical_risk") + std::sqrt(r.component("radius") / 2.0);
      break;
    case Composition::kNormalizedInverse: {
      const double y = r.component("empirical_risk");
      const double rad = r.component("radius");
      raw = y + rad + std::sqrt(rad * rad + 2.0 * y * rad);
      break;
    }
  }
  return raw;
}

}  // namespace infobound
