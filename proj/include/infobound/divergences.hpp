#pragma once

// Exact divergences and information measures on finite distributions and
// Gaussians.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "infobound/common.hpp"
#include "infobound/distributions.hpp"

namespace infobound {

/// D(p || q) in nats; +inf when p is not absolutely continuous w.r.t. q.
inline double kl_discrete(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("kl_discrete: support sizes differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double term = xlogx_over_y(p[i], q[i]);
    if (is_infinite(term)) return kInf;
    acc += term;
  }
  // Rounding can leave tiny negative sums for p ~ q.
  return std::max(acc, 0.0);
}

inline double kl_discrete(const DiscreteDist& p, const DiscreteDist& q) {
  return kl_discrete(p.span(), q.span());
}

/// Binary kl(y || x) = y ln(y/x) + (1-y) ln((1-y)/(1-x)).
inline double kl_binary(double y, double x) {
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("kl_binary: y must lie in [0,1]");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("kl_binary: x must lie in [0,1]");
  const double a = xlogx_over_y(y, x);
  const double b = xlogx_over_y(1.0 - y, 1.0 - x);
  if (is_infinite(a) || is_infinite(b)) return kInf;
  return std::max(a + b, 0.0);
}

/// sup{x in [y,1] : kl(y || x) <= c}, by bisection down to adjacent doubles.
/// The returned point always satisfies kl(y || x) <= c.
inline double kl_binary_inverse_upper(double y, double c) {
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("kl_binary_inverse_upper: y must lie in [0,1]");
  if (!(c >= 0.0)) throw DomainError("kl_binary_inverse_upper: c must be nonnegative");
  if (c == 0.0 || y == 1.0) return y;
  if (is_infinite(c)) return 1.0;
  if (kl_binary(y, 1.0) <= c) return 1.0;
  double lo = y;
  double hi = 1.0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (kl_binary(y, mid) <= c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

struct GaussianKLInputs {
  double mean_diff_norm_sq = 0.0;  // ||w_Q - w_P||^2
  std::vector<double> eigenvalues;  // spectrum of the posterior precision
  double lambda = 1.0;              // prior precision (spherical)
};

/// KL( N(w_P, H_lambda^{-1}) || N(w_Q, lambda^{-1} I) ) from the spectrum of
/// H_lambda.
inline double kl_gaussian_spectral(const GaussianKLInputs& in) {
  if (!(in.lambda > 0.0)) throw DomainError("kl_gaussian_spectral: lambda must be positive");
  if (!(in.mean_diff_norm_sq >= 0.0))
    throw DomainError("kl_gaussian_spectral: squared norm must be nonnegative");
  double log_ratio = 0.0;
  double trace_term = 0.0;
  for (double li : in.eigenvalues) {
    if (!(li > 0.0)) throw DomainError("kl_gaussian_spectral: eigenvalues must be positive");
    log_ratio += std::log(li / in.lambda);
    trace_term += in.lambda / li - 1.0;
  }
  return 0.5 * (in.lambda * in.mean_diff_norm_sq + log_ratio + trace_term);
}

/// KL between diagonal Gaussians N(p_mean, diag p_var) || N(q_mean, diag q_var).
inline double kl_gaussian_diag(std::span<const double> p_mean,
                               std::span<const double> p_var,
                               std::span<const double> q_mean,
                               std::span<const double> q_var) {
  const std::size_t k = p_mean.size();
  if (p_var.size() != k || q_mean.size() != k || q_var.size() != k)
    throw ShapeError("kl_gaussian_diag: vector lengths differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(p_var[i] > 0.0) || !(q_var[i] > 0.0))
      throw DomainError("kl_gaussian_diag: variances must be positive");
    const double d = p_mean[i] - q_mean[i];
    acc += std::log(q_var[i] / p_var[i]) + p_var[i] / q_var[i] + d * d / q_var[i] - 1.0;
  }
  return 0.5 * acc;
}

/// I(S;W) of a joint table.
inline double mutual_info(const JointTable& joint) {
  const auto ps = joint.row_marginal();
  const auto pw = joint.col_marginal();
  double acc = 0.0;
  for (std::size_t s = 0; s < joint.rows(); ++s)
    for (std::size_t w = 0; w < joint.cols(); ++w)
      acc += xlogx_over_y(joint(s, w), ps[s] * pw[w]);
  return std::max(acc, 0.0);
}

/// D(P_{W|S} || q | P_S) = sum_s p(s) D(P_{W|S=s} || q).
inline double conditional_kl(const JointTable& joint, const DiscreteDist& q) {
  if (q.size() != joint.cols()) throw ShapeError("conditional_kl: prior size differs");
  const auto ps = joint.row_marginal();
  double acc = 0.0;
  for (std::size_t s = 0; s < joint.rows(); ++s) {
    if (ps[s] <= 0.0) continue;
    for (std::size_t w = 0; w < joint.cols(); ++w) {
      const double term = xlogx_over_y(joint(s, w), ps[s] * q[w]);
      if (is_infinite(term)) return kInf;
      acc += term;
    }
  }
  return std::max(acc, 0.0);
}

/// I(S;W) - [D(P_{W|S} || q | P_S) - D(P_W || q)]; zero by the golden formula.
inline double golden_formula_residual(const JointTable& joint, const DiscreteDist& q) {
  if (q.size() != joint.cols()) throw ShapeError("golden_formula_residual: prior size differs");
  const double marginal_kl = kl_discrete(joint.col_marginal(), q.probs());
  if (is_infinite(marginal_kl)) return kInf;
  const double cond = conditional_kl(joint, q);
  if (is_infinite(cond)) return kInf;
  return mutual_info(joint) - (cond - marginal_kl);
}

/// I(C;B|A) for a table p(a, b, c); with (a, b, c) = (supersample, selector,
/// hypothesis) this is the CMI of the algorithm.
inline double conditional_mutual_info(const JointTable3& t) {
  const std::size_t na = t.size_a(), nb = t.size_b(), nc = t.size_c();
  double acc = 0.0;
  std::vector<double> pab(nb), pac(nc);
  for (std::size_t a = 0; a < na; ++a) {
    std::fill(pab.begin(), pab.end(), 0.0);
    std::fill(pac.begin(), pac.end(), 0.0);
    double pa = 0.0;
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t c = 0; c < nc; ++c) {
        const double p = t(a, b, c);
        pab[b] += p;
        pac[c] += p;
        pa += p;
      }
    if (pa <= 0.0) continue;
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t c = 0; c < nc; ++c)
        acc += xlogx_over_y(t(a, b, c), pab[b] * pac[c] / pa);
  }
  return std::max(acc, 0.0);
}

struct MaxInformation {
  double value = 0.0;
  bool at_floor = false;  // no event has P(O) > alpha inside the search bracket
};

/// alpha-approximate max-information D_inf^alpha(P_SW || P_S x P_W).
///
/// For alpha = 0 this is ln max p/(p_s p_w). Otherwise bisect on t over
/// [-50, 50]: an event with (P(O) - alpha)/Q(O) > e^t exists iff
/// max_O [P(O) - e^t Q(O)] > alpha, and that maximum is attained by the
/// superlevel set {p > e^t q}. The returned t is the upper end of the final
/// bracket, so it never underestimates.
inline MaxInformation max_info_exact(const JointTable& joint, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("max_info_exact: alpha must lie in [0,1)");
  const auto ps = joint.row_marginal();
  const auto pw = joint.col_marginal();
  std::vector<double> p, q;
  p.reserve(joint.cells().size());
  q.reserve(joint.cells().size());
  for (std::size_t s = 0; s < joint.rows(); ++s)
    for (std::size_t w = 0; w < joint.cols(); ++w) {
      p.push_back(joint(s, w));
      q.push_back(ps[s] * pw[w]);
    }

  if (alpha == 0.0) {
    double best = -kInf;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      if (q[i] <= 0.0) return {kInf, false};
      best = std::max(best, std::log(p[i] / q[i]));
    }
    return {best, false};
  }

  const auto excess = [&](double t) {
    const double scale = std::exp(t);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::max(0.0, p[i] - scale * q[i]);
    return acc;
  };
  double lo = -50.0;
  double hi = 50.0;
  if (excess(hi) > alpha) return {hi, false};
  if (excess(lo) <= alpha) return {lo, true};
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {hi, false};
}

/// Max-information bound for an (epsilon, 0)-DP algorithm on n samples:
/// n eps for alpha = 0, n eps^2/2 + eps sqrt(n ln(2/alpha)/2) otherwise.
inline double max_info_dp_bound(double epsilon, std::size_t n, double alpha) {
  if (!(epsilon >= 0.0)) throw DomainError("max_info_dp_bound: epsilon must be nonnegative");
  if (n == 0) throw DomainError("max_info_dp_bound: n must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("max_info_dp_bound: alpha must lie in [0,1]");
  const double nn = static_cast<double>(n);
  if (alpha == 0.0) return nn * epsilon;
  return nn * epsilon * epsilon / 2.0 + epsilon * std::sqrt(nn * std::log(2.0 / alpha) / 2.0);
}

}  // namespace infobound
