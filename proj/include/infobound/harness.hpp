#pragma once

// Exact enumeration and Monte Carlo certification on finite problems.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "infobound/bounds.hpp"
#include "infobound/cgf.hpp"
#include "infobound/common.hpp"
#include "infobound/distributions.hpp"
#include "infobound/divergences.hpp"
#include "infobound/posterior.hpp"
#include "infobound/problem.hpp"
#include "infobound/sampling.hpp"

namespace infobound {

inline double exact_true_risk(const FiniteProblem& problem, std::size_t w) {
  if (w >= problem.num_hypotheses()) throw ShapeError("exact_true_risk: bad hypothesis index");
  double acc = 0.0;
  for (std::size_t z = 0; z < problem.num_outcomes(); ++z) acc += problem.mu()[z] * problem.loss(w, z);
  return acc;
}

inline std::vector<double> exact_true_risks(const FiniteProblem& problem) {
  std::vector<double> r(problem.num_hypotheses());
  for (std::size_t w = 0; w < r.size(); ++w) r[w] = exact_true_risk(problem, w);
  return r;
}

/// The standard test problem: |W| = 4, |Z| = 2 with Bernoulli losses, mu
/// uniform, n = 50.
inline FiniteProblem standard_problem() {
  return {{{0, 1}, {1, 0}, {0, 1}, {1, 1}}, DiscreteDist::uniform(2), 50};
}

// ---------------------------------------------------------------------------
// Algorithms
// ---------------------------------------------------------------------------

/// Empirical risk minimizer; ties go to the lowest hypothesis index.
struct ErmAlg {};

/// Gibbs posterior on L_S at inverse temperature beta_alg over `base`
/// (uniform when empty).
struct GibbsAlg {
  double beta_alg = 1.0;
  std::vector<double> base;
};

/// Ignores the sample.
struct FixedAlg {
  std::vector<double> posterior;
};

using Algorithm = std::variant<ErmAlg, GibbsAlg, FixedAlg>;

inline DiscreteDist posterior_from_risks(const Algorithm& alg, std::span<const double> risks) {
  const std::size_t k = risks.size();
  if (std::holds_alternative<ErmAlg>(alg)) {
    const auto it = std::min_element(risks.begin(), risks.end());
    return DiscreteDist::point_mass(k, static_cast<std::size_t>(it - risks.begin()));
  }
  if (const auto* g = std::get_if<GibbsAlg>(&alg)) {
    const DiscreteDist base = g->base.empty() ? DiscreteDist::uniform(k) : DiscreteDist(g->base);
    if (base.size() != k) throw ShapeError("GibbsAlg: base measure size differs from |W|");
    return gibbs_posterior(base, risks, g->beta_alg);
  }
  const auto& f = std::get<FixedAlg>(alg);
  DiscreteDist p(f.posterior);
  if (p.size() != k) throw ShapeError("FixedAlg: posterior size differs from |W|");
  return p;
}

inline DiscreteDist run_algorithm(const FiniteProblem& problem, const Algorithm& alg,
                                  std::span<const std::size_t> sample) {
  return posterior_from_risks(alg, problem.empirical_risks(sample));
}

inline PosteriorRule as_rule(const FiniteProblem& problem, const Algorithm& alg) {
  return [problem, alg](std::span<const std::size_t> s) { return run_algorithm(problem, alg, s); };
}

// ---------------------------------------------------------------------------
// Exact joints and expectation bounds
// ---------------------------------------------------------------------------

inline constexpr std::size_t kEnumerationBudget = 1'000'000;

/// p(s, w) = mu^n(s) P_{W|S=s}(w) with samples indexed as in for_each_sample.
inline JointTable enumerate_joint(const FiniteProblem& problem, const Algorithm& alg,
                                  std::size_t budget = kEnumerationBudget) {
  const std::size_t rows = sample_space_size(problem.num_outcomes(), problem.n(), budget);
  const std::size_t cols = problem.num_hypotheses();
  std::vector<double> cells(rows * cols, 0.0);
  for_each_sample(problem.mu(), problem.n(), budget,
                  [&](std::size_t idx, std::span<const std::size_t> s, double p) {
                    if (p <= 0.0) return;
                    const auto post = run_algorithm(problem, alg, s);
                    for (std::size_t w = 0; w < cols; ++w) cells[idx * cols + w] = p * post[w];
                  });
  return JointTable(rows, cols, std::move(cells));
}

/// E[L_mu(W) - L_S(W)] under the enumerated joint.
inline double expected_generalization_gap(const FiniteProblem& problem, const JointTable& joint) {
  const auto true_risk = exact_true_risks(problem);
  std::vector<std::size_t> s(problem.n());
  double acc = 0.0;
  for (std::size_t idx = 0; idx < joint.rows(); ++idx) {
    decode_sample(idx, problem.num_outcomes(), s);
    const auto risks = problem.empirical_risks(s);
    for (std::size_t w = 0; w < joint.cols(); ++w) {
      const double p = joint(idx, w);
      if (p > 0.0) acc += p * (true_risk[w] - risks[w]);
    }
  }
  return acc;
}

struct PriorCheck {
  double avg_kl = 0.0;           // D(P_{W|S} || Q | P_S)
  double bound = 0.0;            // zhang_gen_expectation(avg_kl, n, model)
  double golden_residual = 0.0;  // I - (avg_kl - D(P_W || Q))
  bool holds = true;
};

struct ExpectationReport {
  double expected_gap = 0.0;
  double mutual_info = 0.0;
  double xu_raginsky_bound = kInf;  // only for [0,1] losses
  bool xu_raginsky_holds = true;
  double oracle_bound = 0.0;  // zhang_gen_expectation at Q = P_W
  std::vector<PriorCheck> priors;
  bool all_hold = true;
};

/// Exact E[g], I(S;W) and the in-expectation bounds; `priors` are arbitrary
/// fixed priors to compare through the golden formula.
inline ExpectationReport verify_expectation_bounds(const FiniteProblem& problem, const Algorithm& alg,
                                                   const std::vector<DiscreteDist>& priors = {},
                                                   const LossModel& model = BoundedUnit{},
                                                   std::size_t budget = kEnumerationBudget) {
  if (is_unit_interval(model) && !problem.losses_in_unit_interval())
    throw ConfigError("verify_expectation_bounds: losses are not in [0,1]");
  const JointTable joint = enumerate_joint(problem, alg, budget);
  ExpectationReport rep;
  rep.expected_gap = expected_generalization_gap(problem, joint);
  rep.mutual_info = mutual_info(joint);
  constexpr double kSlack = 1e-12;
  if (problem.losses_in_unit_interval()) {
    rep.xu_raginsky_bound = xu_raginsky(rep.mutual_info, problem.n(), 0.5);
    rep.xu_raginsky_holds = rep.expected_gap <= rep.xu_raginsky_bound + kSlack;
  }
  rep.oracle_bound = zhang_gen_expectation(rep.mutual_info, problem.n(), model);
  rep.all_hold = rep.xu_raginsky_holds && rep.expected_gap <= rep.oracle_bound + kSlack;
  for (const auto& q : priors) {
    PriorCheck c;
    c.avg_kl = conditional_kl(joint, q);
    c.bound = is_infinite(c.avg_kl) ? kInf : zhang_gen_expectation(c.avg_kl, problem.n(), model);
    c.golden_residual = golden_formula_residual(joint, q);
    c.holds = rep.expected_gap <= c.bound + kSlack;
    rep.all_hold = rep.all_hold && c.holds;
    rep.priors.push_back(c);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Violation experiments
// ---------------------------------------------------------------------------

/// One-sided 95% Clopper-Pearson upper limit for k successes in n trials.
inline double clopper_pearson_upper(std::size_t k, std::size_t n, double level = 0.95) {
  if (n == 0) throw ParameterError("clopper_pearson_upper: n must be >= 1");
  if (k > n) throw ParameterError("clopper_pearson_upper: k exceeds n");
  if (k == n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k), level);
}

enum class BoundKind {
  kZhang,             // E_P[M_beta] <= zhang_high_prob
  kZhangGen,          // E_P[g] <= zhang_gen_high_prob
  kUnionBeta,         // E_P[g] <= union_bound_beta
  kCatoni,            // E_P[L_mu] <= catoni_bound
  kCatoniLinear,      // E_P[L_mu] <= catoni_linear
  kMcAllesterLinear,  // E_P[L_mu] <= mcallester_linear
  kPacBayesKl,        // E_P[L_mu] <= pac_bayes_kl
};

inline BoundKind parse_bound_kind(const std::string& name) {
  if (name == "zhang") return BoundKind::kZhang;
  if (name == "zhang-gen") return BoundKind::kZhangGen;
  if (name == "union-beta") return BoundKind::kUnionBeta;
  if (name == "catoni") return BoundKind::kCatoni;
  if (name == "catoni-linear") return BoundKind::kCatoniLinear;
  if (name == "mcallester-linear") return BoundKind::kMcAllesterLinear;
  if (name == "pac-bayes-kl") return BoundKind::kPacBayesKl;
  throw ConfigError("unknown experiment bound: " + name);
}

inline std::string bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::kZhang: return "zhang";
    case BoundKind::kZhangGen: return "zhang-gen";
    case BoundKind::kUnionBeta: return "union-beta";
    case BoundKind::kCatoni: return "catoni";
    case BoundKind::kCatoniLinear: return "catoni-linear";
    case BoundKind::kMcAllesterLinear: return "mcallester-linear";
    case BoundKind::kPacBayesKl: return "pac-bayes-kl";
  }
  return "";
}

struct TrialConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 10'000;
  FiniteProblem problem = standard_problem();
  Algorithm algorithm = GibbsAlg{5.0, {}};
  BoundKind bound = BoundKind::kCatoni;
  double delta = 0.05;
  std::optional<double> beta = 1.0;
  LossModel model = Bernoulli01{};
  std::vector<double> prior;  // fixed PAC-Bayes prior Q; uniform when empty
  double alpha = 2.0;         // union-beta grid ratio
  double v = 10.0;            // union-beta upper end
  double bound_offset = 0.0;  // added to every bound value (sabotage control)
  unsigned threads = 0;       // 0: hardware concurrency
};

struct ViolationReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double rate = 0.0;
  double clopper_pearson_upper_95 = 0.0;
  double bound_mean = 0.0;
  double true_quantity_mean = 0.0;
  double kl_mean = 0.0;
  std::size_t vacuous = 0;
  double delta = 0.0;
  bool certified = false;  // clopper_pearson_upper_95 <= delta
};

namespace detail {

struct TrialOutcome {
  double bound = 0.0;
  double truth = 0.0;
  double kl = 0.0;
  bool vacuous = false;
};

/// Runs fn(t) for t in [0, trials) on up to `threads` workers and reduces in
/// trial order, so the report does not depend on scheduling.
template <class Fn>
ViolationReport run_trials(std::size_t trials, unsigned threads, double delta, Fn fn) {
  if (trials == 0) throw ConfigError("trials must be >= 1");
  std::vector<TrialOutcome> out(trials);
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) out[t] = fn(t);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned k = 0; k < workers; ++k) {
      pool.emplace_back([&, k] {
        try {
          for (std::size_t t = k; t < trials; t += workers) out[t] = fn(t);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  ViolationReport rep;
  rep.trials = trials;
  rep.delta = delta;
  double bsum = 0.0, tsum = 0.0, ksum = 0.0;
  for (const auto& o : out) {
    if (o.truth > o.bound) ++rep.violations;
    if (o.vacuous) ++rep.vacuous;
    bsum += o.bound;
    tsum += o.truth;
    ksum += o.kl;
  }
  const double nt = static_cast<double>(trials);
  rep.rate = static_cast<double>(rep.violations) / nt;
  rep.bound_mean = bsum / nt;
  rep.true_quantity_mean = tsum / nt;
  rep.kl_mean = ksum / nt;
  rep.clopper_pearson_upper_95 = clopper_pearson_upper(rep.violations, trials);
  rep.certified = rep.clopper_pearson_upper_95 <= delta;
  return rep;
}

inline double mean_under(const DiscreteDist& p, std::span<const double> values) {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (p[i] > 0.0) acc += p[i] * values[i];
  return acc;
}

inline DiscreteDist prior_or_uniform(const std::vector<double>& prior, std::size_t k) {
  if (prior.empty()) return DiscreteDist::uniform(k);
  if (prior.size() != k) throw ConfigError("prior size differs from |W|");
  return DiscreteDist(prior);
}

inline void check_trial_config(const TrialConfig& c) {
  if (c.trials == 0) throw ConfigError("trials must be >= 1");
  if (!(c.delta > 0.0 && c.delta <= 1.0)) throw ConfigError("delta must lie in (0,1]");
  const bool needs_unit = c.bound == BoundKind::kCatoni || c.bound == BoundKind::kCatoniLinear ||
                          c.bound == BoundKind::kMcAllesterLinear ||
                          c.bound == BoundKind::kPacBayesKl;
  if (needs_unit && !(is_unit_interval(c.model) && c.problem.losses_in_unit_interval()))
    throw ConfigError(bound_kind_name(c.bound) + " requires losses in [0,1]");
  if (is_unit_interval(c.model) && !c.problem.losses_in_unit_interval())
    throw ConfigError("loss model declares [0,1] losses but the loss matrix leaves [0,1]");
  if (std::holds_alternative<Bernoulli01>(c.model) && !c.problem.losses_binary())
    throw ConfigError("bernoulli01 model requires 0/1 losses");
}

}  // namespace detail

/// Certifies a high-probability bound: per trial, draw S, form the posterior,
/// evaluate the pre-registered bound and the exact quantity it controls.
inline ViolationReport run_violation_experiment(const TrialConfig& config) {
  detail::check_trial_config(config);
  const auto& problem = config.problem;
  const DiscreteDist q = detail::prior_or_uniform(config.prior, problem.num_hypotheses());
  const auto true_risk = exact_true_risks(problem);
  std::vector<double> annealed;
  if (config.bound == BoundKind::kZhang) {
    if (!config.beta) throw ConfigError("zhang requires beta");
    annealed = detail::annealed_all(problem, *config.beta);
  }

  return detail::run_trials(config.trials, config.threads, config.delta, [&](std::size_t t) {
    StreamRng rng(config.seed, t);
    const auto sample = draw_sample(rng, problem.mu(), problem.n());
    const auto risks = problem.empirical_risks(sample);
    const DiscreteDist post = posterior_from_risks(config.algorithm, risks);
    BoundRequest req;
    req.n = problem.n();
    req.delta = config.delta;
    req.beta = config.beta;
    req.empirical_risk = detail::mean_under(post, risks);
    req.kl = kl_discrete(post, q);
    req.model = config.model;
    const double lmu = detail::mean_under(post, true_risk);

    BoundResult b;
    double truth = 0.0;
    switch (config.bound) {
      case BoundKind::kZhang:
        b = zhang_high_prob(req);
        truth = detail::mean_under(post, annealed);
        break;
      case BoundKind::kZhangGen:
        b = zhang_gen_high_prob(req);
        truth = lmu - req.empirical_risk;
        break;
      case BoundKind::kUnionBeta:
        b = union_bound_beta(req, config.alpha, config.v);
        truth = lmu - req.empirical_risk;
        break;
      case BoundKind::kCatoni:
        b = catoni_bound(req);
        truth = lmu;
        break;
      case BoundKind::kCatoniLinear:
        b = catoni_linear(req);
        truth = lmu;
        break;
      case BoundKind::kMcAllesterLinear:
        b = mcallester_linear(req);
        truth = lmu;
        break;
      case BoundKind::kPacBayesKl:
        b = pac_bayes_kl(req);
        truth = lmu;
        break;
    }
    return detail::TrialOutcome{b.value + config.bound_offset, truth, req.kl, b.vacuous};
  });
}

// ---------------------------------------------------------------------------
// Supersample (CMI) experiments
// ---------------------------------------------------------------------------

/// n x 2 supersample plus selector; row i holds (z~_{i,0}, z~_{i,1}) and the
/// training point of row i is z~_{i, u_i}.
struct SupersampleDraw {
  std::vector<std::size_t> z_tilde;  // row-major n x 2
  std::vector<std::uint8_t> u;

  std::size_t n() const { return u.size(); }
  std::size_t at(std::size_t i, std::size_t j) const { return z_tilde[2 * i + j]; }

  std::vector<std::size_t> train() const {
    std::vector<std::size_t> s(n());
    for (std::size_t i = 0; i < n(); ++i) s[i] = at(i, u[i]);
    return s;
  }

  std::vector<std::size_t> ghost() const {
    std::vector<std::size_t> s(n());
    for (std::size_t i = 0; i < n(); ++i) s[i] = at(i, 1 - u[i]);
    return s;
  }

  /// The 2n supersample points as one list.
  std::span<const std::size_t> all() const { return z_tilde; }
};

inline SupersampleDraw draw_supersample(StreamRng& rng, const DiscreteDist& mu, std::size_t n) {
  SupersampleDraw d;
  d.z_tilde = draw_sample(rng, mu, 2 * n);
  d.u.resize(n);
  for (auto& b : d.u) b = rng.coin() ? 1 : 0;
  return d;
}

enum class CmiPrior {
  kOracle,            // Q_{W|z~} = E_U P_{W|z~,U}
  kUniform,           // data-free uniform prior
  kSupersampleGibbs,  // Gibbs posterior on L_{z~} at the algorithm temperature
};

inline CmiPrior parse_cmi_prior(const std::string& name) {
  if (name == "oracle") return CmiPrior::kOracle;
  if (name == "uniform") return CmiPrior::kUniform;
  if (name == "supersample-gibbs") return CmiPrior::kSupersampleGibbs;
  throw ConfigError("unknown CMI prior: " + name);
}

inline std::string cmi_prior_name(CmiPrior p) {
  switch (p) {
    case CmiPrior::kOracle: return "oracle";
    case CmiPrior::kUniform: return "uniform";
    case CmiPrior::kSupersampleGibbs: return "supersample-gibbs";
  }
  return "";
}

inline constexpr std::size_t kMaxOracleFreeRows = 20;

/// E_U P_{W | z~, U}. Only rows whose two entries differ matter. With |Z| = 2
/// the training multiset is fixed by how many differing rows select their
/// larger entry, which is Binomial(d, 1/2); otherwise all 2^d selections are
/// enumerated (d <= 20).
inline DiscreteDist oracle_cmi_prior(const FiniteProblem& problem, const Algorithm& alg,
                                     const SupersampleDraw& draw) {
  const std::size_t n = draw.n();
  const std::size_t k = problem.num_hypotheses();
  std::vector<std::size_t> fixed;
  std::vector<std::size_t> free_rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (draw.at(i, 0) == draw.at(i, 1)) {
      fixed.push_back(draw.at(i, 0));
    } else {
      free_rows.push_back(i);
    }
  }
  std::vector<double> mix(k, 0.0);
  const std::size_t d = free_rows.size();

  if (problem.num_outcomes() == 2) {
    std::vector<std::size_t> s = fixed;
    s.resize(n);
    // log C(d, j) - d ln 2
    for (std::size_t j = 0; j <= d; ++j) {
      for (std::size_t r = 0; r < d; ++r) s[fixed.size() + r] = r < j ? 1 : 0;
      const double lw = std::lgamma(static_cast<double>(d) + 1.0) -
                        std::lgamma(static_cast<double>(j) + 1.0) -
                        std::lgamma(static_cast<double>(d - j) + 1.0) - static_cast<double>(d) * kLn2;
      const double w = std::exp(lw);
      const auto post = run_algorithm(problem, alg, s);
      for (std::size_t h = 0; h < k; ++h) mix[h] += w * post[h];
    }
  } else {
    if (d > kMaxOracleFreeRows)
      throw BudgetError("oracle CMI prior: too many differing supersample rows");
    std::vector<std::size_t> s = fixed;
    s.resize(n);
    const std::size_t total = std::size_t{1} << d;
    const double w = 1.0 / static_cast<double>(total);
    for (std::size_t mask = 0; mask < total; ++mask) {
      for (std::size_t r = 0; r < d; ++r) s[fixed.size() + r] = draw.at(free_rows[r], (mask >> r) & 1U);
      const auto post = run_algorithm(problem, alg, s);
      for (std::size_t h = 0; h < k; ++h) mix[h] += w * post[h];
    }
  }
  return DiscreteDist::from_weights(std::move(mix));
}

struct CmiConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 10'000;
  FiniteProblem problem = standard_problem();
  Algorithm algorithm = GibbsAlg{5.0, {}};
  double delta = 0.05;
  double beta = 0.2;
  CmiPrior prior = CmiPrior::kOracle;
  double bound_offset = 0.0;
  unsigned threads = 0;
};

inline DiscreteDist cmi_prior_for(const CmiConfig& c, const SupersampleDraw& draw) {
  const std::size_t k = c.problem.num_hypotheses();
  switch (c.prior) {
    case CmiPrior::kOracle: return oracle_cmi_prior(c.problem, c.algorithm, draw);
    case CmiPrior::kUniform: return DiscreteDist::uniform(k);
    case CmiPrior::kSupersampleGibbs: {
      double temp = 1.0;
      if (const auto* g = std::get_if<GibbsAlg>(&c.algorithm)) temp = g->beta_alg;
      return gibbs_posterior(DiscreteDist::uniform(k), c.problem.empirical_risks(draw.all()), temp);
    }
  }
  return DiscreteDist::uniform(k);
}

/// Certifies the CMI PAC-Bayes bound on E_P[L_{S bar} - L_S] over draws of (Z~, U).
inline ViolationReport run_cmi_experiment(const CmiConfig& config) {
  if (!config.problem.losses_in_unit_interval())
    throw ConfigError("CMI experiment requires losses in [0,1]");
  if (!(config.delta > 0.0 && config.delta <= 1.0)) throw ConfigError("delta must lie in (0,1]");
  if (!(config.beta > 0.0)) throw ConfigError("beta must be positive");
  const auto& problem = config.problem;
  return detail::run_trials(config.trials, config.threads, config.delta, [&](std::size_t t) {
    StreamRng rng(config.seed, t);
    const auto draw = draw_supersample(rng, problem.mu(), problem.n());
    const auto train_risk = problem.empirical_risks(draw.train());
    const auto ghost_risk = problem.empirical_risks(draw.ghost());
    const DiscreteDist post = posterior_from_risks(config.algorithm, train_risk);
    const DiscreteDist q = cmi_prior_for(config, draw);
    double gap = 0.0;
    for (std::size_t w = 0; w < post.size(); ++w) gap += post[w] * (ghost_risk[w] - train_risk[w]);
    BoundRequest req;
    req.n = problem.n();
    req.delta = config.delta;
    req.beta = config.beta;
    req.kl = kl_discrete(post, q);
    const auto b = cmi_pac_high_prob(req);
    return detail::TrialOutcome{b.value + config.bound_offset, gap, req.kl, b.vacuous};
  });
}

struct CmiEnumeration {
  double cmi = 0.0;                // I(W; U | Z~)
  double expected_gap = 0.0;       // E[L_{S bar}(W) - L_S(W)]
  double expectation_bound = 0.0;  // sqrt(2 CMI / n)
  double upper_limit = 0.0;        // n ln 2
};

/// Exact CMI and expected supersample gap by enumerating Z^{2n} x {0,1}^n.
inline CmiEnumeration enumerate_cmi(const FiniteProblem& problem, const Algorithm& alg,
                                    std::size_t budget = kEnumerationBudget) {
  const std::size_t n = problem.n();
  if (n >= 30) throw BudgetError("enumerate_cmi: n too large");
  const std::size_t nz = sample_space_size(problem.num_outcomes(), 2 * n, budget);
  const std::size_t nu = std::size_t{1} << n;
  if (nz > budget / nu) throw BudgetError("enumerate_cmi: enumeration budget exceeded");
  const std::size_t k = problem.num_hypotheses();
  std::vector<double> cells(nz * nu * k, 0.0);
  double gap = 0.0;
  SupersampleDraw draw;
  draw.u.resize(n);
  draw.z_tilde.resize(2 * n);
  for_each_sample(problem.mu(), 2 * n, budget,
                  [&](std::size_t a, std::span<const std::size_t> zt, double pz) {
                    if (pz <= 0.0) return;
                    std::copy(zt.begin(), zt.end(), draw.z_tilde.begin());
                    for (std::size_t b = 0; b < nu; ++b) {
                      for (std::size_t i = 0; i < n; ++i) draw.u[i] = (b >> i) & 1U;
                      const auto tr = problem.empirical_risks(draw.train());
                      const auto gh = problem.empirical_risks(draw.ghost());
                      const auto post = posterior_from_risks(alg, tr);
                      const double p = pz / static_cast<double>(nu);
                      for (std::size_t w = 0; w < k; ++w) {
                        cells[(a * nu + b) * k + w] = p * post[w];
                        gap += p * post[w] * (gh[w] - tr[w]);
                      }
                    }
                  });
  CmiEnumeration out;
  out.cmi = conditional_mutual_info(JointTable3(nz, nu, k, std::move(cells)));
  out.expected_gap = gap;
  out.expectation_bound = cmi_expectation(out.cmi, n);
  out.upper_limit = static_cast<double>(n) * kLn2;
  return out;
}

// ---------------------------------------------------------------------------
// Differentially private priors
// ---------------------------------------------------------------------------

/// Exponential mechanism with score -L_S and sensitivity 1/n: the Gibbs
/// measure at inverse temperature n eps / 2 over `base`.
inline DiscreteDist exponential_mechanism_prior(const FiniteProblem& problem,
                                                std::span<const std::size_t> sample, double epsilon,
                                                const DiscreteDist& base) {
  if (!problem.losses_in_unit_interval())
    throw ConfigError("exponential mechanism requires losses in [0,1]");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
  const double temp = static_cast<double>(sample.size()) * epsilon / 2.0;
  return gibbs_posterior(base, problem.empirical_risks(sample), temp);
}

/// max over neighboring samples (one position changed) and hypotheses of
/// |ln Q0(s)(w) - ln Q0(s')(w)|, by exhaustive enumeration.
inline double exponential_mechanism_max_log_ratio(const FiniteProblem& problem, double epsilon,
                                                  std::size_t budget = kEnumerationBudget) {
  const std::size_t nz = problem.num_outcomes();
  const std::size_t n = problem.n();
  const DiscreteDist base = DiscreteDist::uniform(problem.num_hypotheses());
  const std::size_t total = sample_space_size(nz, n, budget);
  std::vector<std::size_t> s(n), t(n);
  double worst = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    decode_sample(idx, nz, s);
    const auto p = exponential_mechanism_prior(problem, s, epsilon, base);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t z = 0; z < nz; ++z) {
        if (z == s[i]) continue;
        t = s;
        t[i] = z;
        const auto q = exponential_mechanism_prior(problem, t, epsilon, base);
        for (std::size_t w = 0; w < p.size(); ++w)
          worst = std::max(worst, std::abs(std::log(p[w]) - std::log(q[w])));
      }
    }
  }
  return worst;
}

struct DpPriorConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 10'000;
  FiniteProblem problem = standard_problem();
  Algorithm algorithm = GibbsAlg{5.0, {}};
  double delta = 0.05;
  double beta = 1.0;
  double epsilon = 0.2;
  LossModel model = Bernoulli01{};
  double bound_offset = 0.0;
  unsigned threads = 0;
};

/// Certifies dp_prior_high_prob with the exponential-mechanism prior against
/// exact E_P[M_beta].
inline ViolationReport dp_prior_experiment(const DpPriorConfig& config) {
  const auto& problem = config.problem;
  if (!problem.losses_in_unit_interval())
    throw ConfigError("DP-prior experiment requires losses in [0,1]");
  if (!(config.delta > 0.0 && config.delta <= 1.0)) throw ConfigError("delta must lie in (0,1]");
  if (!(config.beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(config.epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
  const auto annealed = detail::annealed_all(problem, config.beta);
  const DiscreteDist base = DiscreteDist::uniform(problem.num_hypotheses());
  return detail::run_trials(config.trials, config.threads, config.delta, [&](std::size_t t) {
    StreamRng rng(config.seed, t);
    const auto sample = draw_sample(rng, problem.mu(), problem.n());
    const auto risks = problem.empirical_risks(sample);
    const DiscreteDist post = posterior_from_risks(config.algorithm, risks);
    const DiscreteDist q0 = exponential_mechanism_prior(problem, sample, config.epsilon, base);
    BoundRequest req;
    req.n = problem.n();
    req.delta = config.delta;
    req.beta = config.beta;
    req.empirical_risk = detail::mean_under(post, risks);
    req.kl = kl_discrete(post, q0);
    req.model = config.model;
    const auto b = dp_prior_high_prob(req, config.epsilon);
    return detail::TrialOutcome{b.value + config.bound_offset, detail::mean_under(post, annealed),
                                req.kl, b.vacuous};
  });
}

/// Size ceil(log_alpha(v/u)) of the union-bound beta grid u alpha^i with
/// u = min(sqrt(2 alpha)/sigma, v) / sqrt(n); at least one point.
inline std::size_t union_grid_size(std::size_t n, double alpha, double v, double sigma) {
  if (!(alpha > 1.0) || !(v > 0.0) || !(sigma > 0.0) || n == 0)
    throw ParameterError("union_grid_size: invalid arguments");
  const double u = std::min(std::sqrt(2.0 * alpha) / sigma, v) / std::sqrt(static_cast<double>(n));
  const double steps = std::ceil(std::log(v / u) / std::log(alpha) - 1e-12);
  return static_cast<std::size_t>(std::max(steps, 1.0));
}

}  // namespace infobound
