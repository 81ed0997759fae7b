#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "infobound/posterior.hpp"
#include "support.hpp"

using namespace infobound;
using testing_support::random_dist;
using testing_support::random_problem;
using testing_support::random_vector;

namespace {

QuadraticModel model1d(double h, double lambda, std::size_t n, double beta, double wp = 0.0, double wq = 0.0) {
  return QuadraticModel{{h}, {wp}, {wq}, lambda, n, beta};
}

double naive_kl(const DiscreteDist& p, const DiscreteDist& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) acc += p[i] * std::log(p[i] / q[i]);
  return acc;
}

}  // namespace

TEST(GibbsPosterior, Examples) {
  const auto q = DiscreteDist::uniform(2);
  const std::vector<double> f{0.0, 1.0};
  const auto zero = gibbs_posterior(q, f, 0.0);
  EXPECT_EQ(zero[0], 0.5);
  const auto p = gibbs_posterior(q, f, std::log(2.0));
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
  const auto cold = gibbs_posterior(DiscreteDist::uniform(3), std::vector<double>{0.4, 0.1, 0.7}, 1e4);
  EXPECT_NEAR(cold[1], 1.0, 1e-12);
}

TEST(GibbsPosterior, InfiniteTemperatureTiesAndDegenerate) {
  const auto p = gibbs_posterior(DiscreteDist({0.2, 0.3, 0.5}), std::vector<double>{0.1, 0.4, 0.1}, kInf);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[2], 0.5);
  EXPECT_THROW(gibbs_posterior(DiscreteDist({1.0, 0.0}), std::vector<double>{kInf, 0.0}, 1.0), DegenerateError);
  EXPECT_THROW(gibbs_posterior(DiscreteDist::uniform(2), std::vector<double>{0.0}, 1.0), ShapeError);
}

TEST(GibbsPosterior, NormalizesUnderExtremeEnergies) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto q = random_dist(rng, 6, 0.2);
    const auto f = random_vector(rng, 6, -1e3, 1e3);
    const auto p = gibbs_posterior(q, f, 3.0);
    double total = 0.0;
    for (std::size_t w = 0; w < 6; ++w) total += p[w];
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(StochasticComplexity, Examples) {
  const auto q = DiscreteDist::uniform(2);
  EXPECT_NEAR(stochastic_complexity(DiscreteDist({0.3, 0.7}), std::vector<double>{0.8, 0.8}, 2.0), 0.8, 1e-15);
  EXPECT_NEAR(stochastic_complexity(q, std::vector<double>{0.0, 1.0}, std::log(2.0)), 0.415037, 1e-6);
  EXPECT_NEAR(stochastic_complexity(q, std::vector<double>{0.0, 1.0}, std::log(2.0)),
              -std::log(0.75) / std::log(2.0), 1e-15);
}

TEST(StochasticComplexity, EqualsInformationComplexityOfGibbs) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 500; ++i) {
    const auto q = random_dist(rng, 5, 0.2);
    const auto f = random_vector(rng, 5, -3.0, 3.0);
    const double beta = std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
    const auto p = gibbs_posterior(q, f, beta);
    double mean = 0.0;
    for (std::size_t w = 0; w < 5; ++w) mean += p[w] * f[w];
    EXPECT_NEAR(stochastic_complexity(q, f, beta), mean + naive_kl(p, q) / beta, 1e-10);
  }
}

TEST(Oic, Example) {
  // L_S = (0, 0.5) with n = 2, beta = 1: n beta = 2.
  const FiniteProblem prob({{0.0, 0.0}, {0.0, 1.0}}, DiscreteDist::uniform(2), 2);
  const std::vector<std::size_t> sample{0, 1};
  const auto r = oic(DiscreteDist::uniform(2), prob, sample, 1.0);
  const double e = std::exp(-1.0);
  EXPECT_NEAR(r.posterior[0], 1.0 / (1.0 + e), 1e-15);
  EXPECT_NEAR(r.value, -0.5 * std::log((1.0 + e) / 2.0), 1e-15);
}

TEST(Oic, SmallBetaLimitAndErrors) {
  const FiniteProblem prob({{0.0, 0.0}, {0.0, 1.0}}, DiscreteDist::uniform(2), 2);
  const std::vector<std::size_t> sample{1, 1};
  const auto q = DiscreteDist({0.25, 0.75});
  const auto r = oic(q, prob, sample, 1e-10);
  EXPECT_NEAR(r.posterior[0], 0.25, 1e-9);
  EXPECT_NEAR(r.value, 0.75, 1e-9);
  EXPECT_THROW(oic(q, prob, std::vector<std::size_t>{}, 1.0), DomainError);
  EXPECT_THROW(oic(q, prob, std::vector<std::size_t>{1}, 1.0), ShapeError);
}

TEST(Oic, RandomPerturbationsNeverBeatIt) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const auto prob = random_problem(rng, 4, 3, 5);
    StreamRng srng(t, 0);
    const auto sample = draw_sample(srng, prob.mu(), prob.n());
    const auto q = random_dist(rng, 4);
    const double beta = 0.5 + u(rng);
    const auto r = oic(q, prob, sample, beta);
    const auto risks = prob.empirical_risks(sample);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> w(4);
      for (std::size_t k = 0; k < 4; ++k) w[k] = r.posterior[k] * std::exp(0.5 * (u(rng) - 0.5));
      const auto p = DiscreteDist::from_weights(w);
      EXPECT_GE(information_complexity(p, q, risks, prob.n() * beta), r.value - 1e-12);
    }
  }
}

TEST(DvIdentity, Examples) {
  const auto q = DiscreteDist({0.1, 0.6, 0.3});
  const std::vector<double> f{0.3, -1.0, 2.0};
  EXPECT_NEAR(dv_identity_residual(gibbs_posterior(q, f, 1.7), q, f, 1.7), 0.0, 1e-12);
  EXPECT_NEAR(dv_identity_residual(q, q, f, 1.7), 0.0, 1e-12);
}

TEST(DvIdentity, RandomInputs) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 1000; ++i) {
    const auto q = random_dist(rng, 6);
    const auto p = random_dist(rng, 6, 0.3);
    const auto f = random_vector(rng, 6, 0.0, 1.0);
    const double beta = std::exp(std::uniform_real_distribution<double>(-2.0, 3.0)(rng));
    EXPECT_NEAR(dv_identity_residual(p, q, f, beta), 0.0, 1e-10);
  }
}

TEST(Iei, ConstantRuleIsAtMostOne) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 20; ++t) {
    const auto prob = random_problem(rng, 3, 2, 1 + t % 6);
    const auto q = random_dist(rng, 3);
    const PosteriorRule rule = [&](std::span<const std::size_t>) { return q; };
    EXPECT_LE(iei_exact(prob, rule, q, 1.0), 1.0 + 1e-12);
  }
}

TEST(Iei, GibbsRuleExactAndMonteCarlo) {
  std::mt19937_64 rng(45);
  const auto prob = random_problem(rng, 3, 2, 4);
  const auto q = DiscreteDist::uniform(3);
  for (double beta : {0.25, 1.0, 4.0}) {
    const PosteriorRule rule = [&](std::span<const std::size_t> s) {
      return gibbs_posterior(q, prob.empirical_risks(s), 2.0);
    };
    const double exact = iei_exact(prob, rule, q, beta);
    EXPECT_LE(exact, 1.0 + 1e-10);
    const auto mc = iei_empirical_check(prob, rule, q, beta, 20000, 7);
    EXPECT_TRUE(mc.consistent);
    EXPECT_NEAR(mc.mean, exact, 4.0 * mc.std_error + 1e-12);
  }
}

TEST(Iei, InfiniteKlContributesZero) {
  const FiniteProblem prob({{0.0, 1.0}, {1.0, 0.0}}, DiscreteDist::uniform(2), 2);
  const DiscreteDist q({1.0, 0.0});
  const PosteriorRule rule = [](std::span<const std::size_t>) { return DiscreteDist({0.0, 1.0}); };
  EXPECT_EQ(iei_exact(prob, rule, q, 1.0), 0.0);
}

TEST(GaussianCovariance, Examples) {
  const auto flat = optimal_gaussian_covariance(QuadraticModel{{0.0, 0.0}, {0, 0}, {0, 0}, 4.0, 10, 1.0});
  EXPECT_DOUBLE_EQ(flat[0], 0.25);
  EXPECT_DOUBLE_EQ(flat[1], 0.25);
  EXPECT_DOUBLE_EQ(optimal_gaussian_covariance(model1d(1.0, 1.0, 1, 1.0))[0], 0.5);
  EXPECT_THROW(optimal_gaussian_covariance(model1d(-1.0, 0.5, 1, 1.0)), DomainError);
}

TEST(GaussianCovariance, PerturbationsIncreaseObjective) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const QuadraticModel m{{0.5, 2.0, 0.0, 7.0}, {0.1, -0.2, 0.3, 1.0}, {0.0, 0.0, 0.0, 0.0}, 0.3, 20, 0.7};
  const auto star = optimal_gaussian_covariance(m);
  const double base = gaussian_icm_objective(m, star);
  for (int i = 0; i < 50; ++i) {
    auto cov = star;
    for (double& c : cov) c *= std::exp(0.4 * (u(rng) - 0.5));
    EXPECT_GT(gaussian_icm_objective(m, cov), base);
  }
}

TEST(GaussianCovariance, Stationarity) {
  const QuadraticModel m{{0.5, 2.0, 3.0}, {0.1, -0.2, 0.3}, {0.0, 0.0, 0.0}, 0.3, 20, 0.7};
  const auto star = optimal_gaussian_covariance(m);
  std::mt19937_64 rng(62);
  for (int i = 0; i < 20; ++i) {
    const auto dir = random_vector(rng, 3, -1.0, 1.0);
    const double h = 1e-4;
    auto plus = star, minus = star;
    for (std::size_t k = 0; k < 3; ++k) {
      plus[k] += h * dir[k] * star[k];
      minus[k] -= h * dir[k] * star[k];
    }
    const double d = (gaussian_icm_objective(m, plus) - gaussian_icm_objective(m, minus)) / (2.0 * h);
    EXPECT_NEAR(d, 0.0, 1e-5);
  }
}

TEST(ExpectedQuadraticLoss, Examples) {
  const QuadraticModel m{{1.0, 2.0}, {0, 0}, {0, 0}, 1.0, 1, 1.0};
  EXPECT_EQ(expected_quadratic_loss(m, std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(expected_quadratic_loss(m, std::vector<double>{1.0, 1.0}), 1.5);
  const auto m1 = model1d(1.0, 1.0, 1, 1.0);
  EXPECT_DOUBLE_EQ(expected_quadratic_loss(m1, optimal_gaussian_covariance(m1)), 0.25);
}

TEST(ExpectedQuadraticLoss, MatchesMonteCarlo) {
  const QuadraticModel m{{1.0, 3.0}, {0, 0}, {0, 0}, 1.0, 1, 1.0};
  const std::vector<double> cov{0.4, 0.2};
  EXPECT_NEAR(mc_quadratic_risk(m, cov, 400000, 3), expected_quadratic_loss(m, cov), 5e-3);
}

TEST(OccamBound, Examples) {
  const QuadraticModel flat{{0.0, 0.0}, {0.2, 0.2}, {0.2, 0.2}, 1.0, 10, 1.0};
  EXPECT_NEAR(occam_bound(flat, 1.0, 0.37).bound.value, 0.37, 1e-15);
  EXPECT_DOUBLE_EQ(occam_bound(flat, 1.0, 0.37).occam_factor, 1.0);
  // lambda_1 = n beta h + lambda = 10 * 0.1 + 1 = 2.
  const auto r = occam_bound(model1d(0.1, 1.0, 10, 1.0), 1.0, 0.0);
  EXPECT_NEAR(r.bound.value, std::log(2.0) / 20.0, 1e-15);
  EXPECT_NEAR(r.bound.value, 0.034657, 1e-6);
  EXPECT_NEAR(r.occam_factor, std::sqrt(0.5), 1e-15);
}

TEST(OccamBound, DominatesZhangWithExactKl) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = 1 + i % 4;
    QuadraticModel m{random_vector(rng, k, 0.0, 5.0), random_vector(rng, k, -1.0, 1.0),
                     random_vector(rng, k, -1.0, 1.0), 0.05 + u(rng), 1 + static_cast<std::size_t>(100 * u(rng)),
                     0.1 + u(rng)};
    const double delta = 0.01 + 0.99 * u(rng), risk = u(rng);
    const auto occ = occam_bound(m, delta, risk);
    BoundRequest req;
    req.n = m.n;
    req.delta = delta;
    req.beta = m.beta;
    req.empirical_risk = risk;
    req.kl = occ.kl_exact;
    req.model = SubGaussian{1.0};
    const double z = zhang_high_prob(req).value;
    double dropped = 0.0;
    for (double li : m.posterior_precision()) dropped += 0.5 * (1.0 - m.lambda / li);
    EXPECT_GE(occ.bound.value, z - 1e-12);
    EXPECT_NEAR(occ.bound.value - z, dropped / m.temperature(), 1e-10);
    EXPECT_GT(occ.occam_factor, 0.0);
    EXPECT_LE(occ.occam_factor, 1.0);
    EXPECT_NEAR(recompose(occ.bound), occ.bound.value, 1e-12);
  }
}

TEST(PacBayesSgd, AddendsMatchScalarArithmetic) {
  PacBayesSgdParams p;
  p.alpha = 2.0;
  p.beta = 2.0;
  p.n = 10000;
  p.delta = 0.05;
  p.delta_prime = 0.05;
  p.b = 100;
  p.c = 0.1;
  p.lambda = 0.01;
  p.m = 1000;
  p.kl = 50.0;
  p.mc_empirical_risk = 0.05;
  const auto r = pacbayes_sgd_objective(p);
  const double s = 2.0 / (10000.0 * 2.0);
  const double beta_grid = 2.0 * s * std::log(std::log(4.0 * 2.0 * 10000.0) / std::log(2.0));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double lambda_grid = s * std::log(pi2 * 1e4 / (6.0 * 0.05) * std::pow(std::log(10.0), 2));
  const double mc = std::sqrt(std::log(40.0) / 2000.0);
  EXPECT_NEAR(r.component("beta_grid"), beta_grid, 1e-15);
  EXPECT_NEAR(r.component("lambda_grid"), lambda_grid, 1e-15);
  EXPECT_NEAR(r.component("monte_carlo"), mc, 1e-15);
  EXPECT_NEAR(r.component("complexity"), 50.0 * s, 1e-15);
  const double x = 0.05 + 50.0 * s + beta_grid + lambda_grid + mc;
  EXPECT_NEAR(r.value, -std::expm1(-2.0 * x) / -std::expm1(-2.0), 1e-14);
  EXPECT_NEAR(recompose(r), r.raw_value, 1e-14);
}

TEST(PacBayesSgd, MonotoneAndLimits) {
  PacBayesSgdParams p;
  p.n = 5000;
  double prev = -1.0;
  for (int i = 0; i <= 20; ++i) {
    p.kl = 5.0 * i;
    const double v = pacbayes_sgd_objective(p).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
  p.kl = 1.0;
  prev = -1.0;
  for (int i = 0; i <= 20; ++i) {
    p.mc_empirical_risk = 0.02 * i;
    const double v = pacbayes_sgd_objective(p).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
  p.m = 1000000000000ULL;
  EXPECT_LT(pacbayes_sgd_objective(p).component("monte_carlo"), 1e-5);
}

TEST(PacBayesSgd, Errors) {
  PacBayesSgdParams p;
  p.beta = 1.0;
  EXPECT_THROW(pacbayes_sgd_objective(p), ParameterError);
  p = {};
  p.lambda = 0.2;
  EXPECT_THROW(pacbayes_sgd_objective(p), ParameterError);
  p = {};
  p.alpha = 1.0;
  EXPECT_THROW(pacbayes_sgd_objective(p), ParameterError);
}

TEST(LocalEntropy, Examples) {
  EXPECT_NEAR(local_entropy(model1d(1.0, 1.0, 1, 1.0), 1.0), -0.5 * std::log(std::numbers::pi), 1e-15);
  EXPECT_THROW(local_entropy(model1d(1.0, 1.0, 1, 1.0), 0.0), DomainError);
  EXPECT_THROW(local_entropy(model1d(1.0, 1.0, 1, 1.0), -1.0), DomainError);
}

TEST(LocalEntropy, VolumeShrinksWithCurvature) {
  // -beta * local_entropy is the log Gaussian volume; it decreases as any h_i grows.
  for (double beta : {0.5, 1.0, 3.0}) {
    double prev = kInf;
    for (int i = 0; i <= 20; ++i) {
      const QuadraticModel m{{0.3, 0.25 * i}, {0, 0}, {0, 0}, 1.0, 1, beta};
      const double vol = -beta * local_entropy(m, 0.7);
      EXPECT_LT(vol, prev);
      prev = vol;
    }
  }
}

TEST(LocalEntropy, MonteCarloAgreement) {
  const QuadraticModel m{{1.0, 2.5}, {0.2, -0.1}, {0, 0}, 1.0, 1, 1.5};
  const double gamma = 0.8;
  const auto mc = local_entropy_mc(m, gamma, 1000000, 17);
  EXPECT_NEAR(mc.value, local_entropy(m, gamma), 3.0 * mc.std_error);
  const std::vector<double> w{0.6, 0.4};
  const auto shifted = local_entropy_mc(m, gamma, 1000000, 18, w);
  EXPECT_NEAR(shifted.value, local_entropy(m, gamma, w), 3.0 * shifted.std_error);
}

TEST(McCorrection, Example) {
  EXPECT_NEAR(mc_correction(200, 0.05), std::sqrt(std::log(40.0) / 400.0), 1e-15);
  EXPECT_NEAR(mc_correction(200, 0.05), 0.096032, 1e-6);
  EXPECT_LT(mc_correction(1000000000, 0.05), 1e-4);
  EXPECT_THROW(mc_correction(0, 0.05), ParameterError);
}
