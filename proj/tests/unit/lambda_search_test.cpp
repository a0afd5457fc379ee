#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gam_fixture.hpp"
#include "patsim/gam/lambda_search.hpp"

namespace patsim::gam {
namespace {

using testing::make_instance;

double gcv_at(const LeastSquaresSystem& sys, const std::vector<PenaltyBlock>& pen, double log_lambda) {
  const std::vector<double> lam = {std::exp(log_lambda)};
  const PenalizedSolution sol = fit_penalized_ls(sys, pen, lam);
  return gcv_score(sol.rss, sol.hat_trace, sys.n);
}

TEST(GcvScore, Formula) {
  EXPECT_DOUBLE_EQ(gcv_score(10.0, 5.0, 105), 105.0 * 10.0 / 10000.0);
  EXPECT_EQ(gcv_score(1.0, 10.0, 10), std::numeric_limits<double>::infinity());
}

TEST(OptimizeLambda, AgreesWithFineGrid) {
  const LambdaSearchOptions options;
  const double step = (options.log_lambda_max - options.log_lambda_min) / 200.0;
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const auto inst = make_instance(500, 20, seed, 0.5);
    const LeastSquaresSystem sys = make_system(inst.x, inst.y, inst.names);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 200; ++k)
      best = std::min(best, gcv_at(sys, inst.penalties, options.log_lambda_min + k * step));

    const LambdaSearchResult r = optimize_lambda(sys, inst.penalties, options);
    EXPECT_TRUE(r.converged);
    ASSERT_EQ(r.lambda.size(), 1u);
    EXPECT_LE(r.gcv, best * (1 + 1e-9)) << "seed " << seed;
    EXPECT_NEAR(r.gcv, gcv_at(sys, inst.penalties, std::log(r.lambda[0])), 1e-12 * r.gcv);
  }
}

TEST(OptimizeLambda, NoiseOnlySmoothIsFlattened) {
  auto inst = make_instance(800, 15, 30, 1.0);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> e(0.0, 1.0);
  for (Eigen::Index i = 0; i < inst.y.size(); ++i) inst.y(i) = 0.5 * inst.x(i, 1) + e(rng);
  const LeastSquaresSystem sys = make_system(inst.x, inst.y, inst.names);
  const LambdaSearchResult r = optimize_lambda(sys, inst.penalties);
  const std::vector<double> lam = r.lambda;
  const PenalizedSolution sol = fit_penalized_ls(sys, inst.penalties, lam);
  EXPECT_LT(sol.edf_columns.tail(inst.penalties[0].width()).sum(), 2.5);
  EXPECT_GT(std::log(r.lambda[0]), 4.0);
}

TEST(OptimizeLambda, WigglySignalGetsSmallLambda) {
  auto inst = make_instance(1000, 25, 40, 0.2);
  for (Eigen::Index i = 0; i < inst.y.size(); ++i)
    inst.y(i) += std::sin(20.0 * inst.covariate[static_cast<std::size_t>(i)]) - std::sin(6.0 * inst.covariate[static_cast<std::size_t>(i)]);
  const LeastSquaresSystem sys = make_system(inst.x, inst.y, inst.names);
  const LambdaSearchResult r = optimize_lambda(sys, inst.penalties);
  const double flat = gcv_at(sys, inst.penalties, 12.0);
  EXPECT_LT(r.gcv, 0.5 * flat);
  EXPECT_LT(std::log(r.lambda[0]), 4.0);

  const std::vector<double> lam = r.lambda;
  const PenalizedSolution sol = fit_penalized_ls(sys, inst.penalties, lam);
  const Eigen::VectorXd fit = inst.x * sol.beta;
  double err = 0;
  for (Eigen::Index i = 0; i < inst.y.size(); ++i) {
    const double t = inst.covariate[static_cast<std::size_t>(i)];
    const double truth = 1.0 + 2.0 * inst.x(i, 1) + std::sin(20.0 * t);
    err += (fit(i) - truth) * (fit(i) - truth);
  }
  EXPECT_LT(std::sqrt(err / static_cast<double>(inst.y.size())), 0.1);
}

TEST(OptimizeLambda, IsDeterministicAndRespectsBounds) {
  const auto inst = make_instance(300, 10, 50);
  const LeastSquaresSystem sys = make_system(inst.x, inst.y, inst.names);
  LambdaSearchOptions options;
  options.log_lambda_min = -2.0;
  options.log_lambda_max = 3.0;
  const LambdaSearchResult a = optimize_lambda(sys, inst.penalties, options);
  const LambdaSearchResult b = optimize_lambda(sys, inst.penalties, options);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.gcv, b.gcv);
  EXPECT_GE(std::log(a.lambda[0]), -2.0 - 1e-12);
  EXPECT_LE(std::log(a.lambda[0]), 3.0 + 1e-12);
}

TEST(OptimizeLambda, HandlesSeveralSmooths) {
  auto inst = make_instance(600, 10, 60);
  // Second penalty on the same block: the search must still find a finite optimum.
  inst.penalties.push_back(inst.penalties[0]);
  const LeastSquaresSystem sys = make_system(inst.x, inst.y, inst.names);
  const LambdaSearchResult r = optimize_lambda(sys, inst.penalties);
  ASSERT_EQ(r.lambda.size(), 2u);
  EXPECT_TRUE(std::isfinite(r.gcv));
  EXPECT_GE(r.cycles, 1);
}

}  // namespace
}  // namespace patsim::gam
