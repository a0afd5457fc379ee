#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "patsim/error.hpp"
#include "patsim/gam/bspline.hpp"

namespace patsim::gam {
namespace {

// Textbook Cox-de Boor recursion with the right-closed last interval.
double cox_de_boor(const std::vector<double>& t, int i, int p, double x) {
  if (p == 0) {
    if (t[i] <= x && x < t[i + 1]) return 1.0;
    return x == t.back() && t[i] < t[i + 1] && t[i + 1] == t.back() ? 1.0 : 0.0;
  }
  double a = 0.0, b = 0.0;
  if (t[i + p] != t[i]) a = (x - t[i]) / (t[i + p] - t[i]) * cox_de_boor(t, i, p - 1, x);
  if (t[i + p + 1] != t[i + 1]) b = (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * cox_de_boor(t, i + 1, p - 1, x);
  return a + b;
}

std::vector<double> random_x(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> g(2.0, 3.0);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

TEST(BSplineBasis, PartitionOfUnity) {
  const auto x = random_x(500, 1);
  for (int degree : {1, 2, 3, 4}) {
    const BSplineBasis b = BSplineBasis::with_quantile_knots(x, 20, degree);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(b.lower(), b.upper());
    std::vector<double> row(b.size());
    for (int k = 0; k < 1000; ++k) {
      b.evaluate(u(rng), row);
      double sum = 0;
      for (double v : row) {
        EXPECT_GE(v, -1e-15);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-10);
    }
    b.evaluate(b.upper(), row);
    EXPECT_NEAR(row.back(), 1.0, 1e-12);
    b.evaluate(b.lower(), row);
    EXPECT_NEAR(row.front(), 1.0, 1e-12);
  }
}

TEST(BSplineBasis, MatchesTextbookRecursion) {
  const std::vector<double> knots = {0, 0, 0, 0, 0.7, 1.5, 1.6, 3, 4, 4, 4, 4};
  const BSplineBasis b(knots, 3);
  ASSERT_EQ(b.size(), 8);
  std::vector<double> row(8);
  for (double x : {0.0, 0.3, 0.7, 1.55, 2.2, 3.0, 3.99, 4.0}) {
    b.evaluate(x, row);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(row[i], cox_de_boor(knots, i, 3, x), 1e-13) << "x=" << x << " i=" << i;
  }
}

TEST(BSplineBasis, QuantileKnotsAreClampedAndSorted) {
  const auto x = random_x(300, 3);
  const BSplineBasis b = BSplineBasis::with_quantile_knots(x, 12, 3);
  EXPECT_EQ(b.size(), 12);
  EXPECT_EQ(b.lower(), *std::min_element(x.begin(), x.end()));
  EXPECT_EQ(b.upper(), *std::max_element(x.begin(), x.end()));
  EXPECT_TRUE(std::is_sorted(b.knots().begin(), b.knots().end()));
  EXPECT_EQ(std::count(b.knots().begin(), b.knots().end(), b.lower()), 4);
}

TEST(BSplineBasis, ClampsOutsideTheSpan) {
  const auto x = random_x(100, 4);
  const BSplineBasis b = BSplineBasis::with_quantile_knots(x, 8, 3);
  std::vector<double> lo(8), out(8);
  b.evaluate(b.lower(), lo);
  b.evaluate(b.lower() - 100, out);
  EXPECT_EQ(lo, out);
}

TEST(DifferenceMatrix, PenaltyRankIsSizeMinusOrder) {
  const Eigen::MatrixXd d = difference_matrix(5, 2);
  ASSERT_EQ(d.rows(), 3);
  Eigen::MatrixXd expected(3, 5);
  expected << 1, -2, 1, 0, 0, 0, 1, -2, 1, 0, 0, 0, 1, -2, 1;
  EXPECT_EQ(d, expected);
  for (int q : {5, 10, 20})
    for (int order : {1, 2, 3}) {
      const Eigen::MatrixXd dq = difference_matrix(q, order);
      const Eigen::MatrixXd s = dq.transpose() * dq;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
      EXPECT_EQ(lu.rank(), q - order) << "q=" << q << " order=" << order;
    }
}

TEST(DifferenceMatrix, DividedDifferencesOverAbscissae) {
  const std::vector<double> even = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  for (int order : {1, 2, 3})
    EXPECT_LT((difference_matrix(even, order) - difference_matrix(6, order)).norm(), 1e-12);

  const std::vector<double> uneven = {0.0, 0.1, 0.5, 0.6, 2.0, 3.5, 3.6};
  Eigen::VectorXd line(7), square(7);
  for (int i = 0; i < 7; ++i) {
    line(i) = 2.0 - 3.0 * uneven[i];
    square(i) = uneven[i] * uneven[i];
  }
  EXPECT_LT((difference_matrix(uneven, 2) * line).norm(), 1e-12);
  EXPECT_GT((difference_matrix(uneven, 2) * square).norm(), 1e-3);
  EXPECT_LT((difference_matrix(uneven, 3) * square).norm(), 1e-11);
  const Eigen::MatrixXd d = difference_matrix(uneven, 2);
  EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(d.transpose() * d).rank(), 5);
  EXPECT_THROW(difference_matrix(std::vector<double>{0.0, 1.0, 1.0}, 1), ValidationError);
}

TEST(BSplineBasis, GrevilleAbscissaeReproduceX) {
  const auto x = random_x(300, 9);
  for (int degree : {1, 2, 3}) {
    const BSplineBasis b = BSplineBasis::with_quantile_knots(x, 12, degree);
    const std::vector<double> g = b.greville();
    ASSERT_EQ(g.size(), 12u);
    std::vector<double> out(12);
    for (int i = 0; i <= 50; ++i) {
      const double t = b.lower() + (b.upper() - b.lower()) * i / 50.0;
      b.evaluate(t, out);
      double sum = 0;
      for (std::size_t k = 0; k < 12; ++k) sum += g[k] * out[k];
      EXPECT_NEAR(sum, t, 1e-12 * (1 + std::abs(t)));
    }
  }
}

TEST(ConstrainedSmooth, ColumnsSumToZeroOverData) {
  const auto x = random_x(400, 5);
  const SmoothTerm term{"x", 10, 3, 2};
  const BasisBlock block = build_basis(x, term);
  EXPECT_EQ(block.design.cols(), 9);
  EXPECT_LT(block.design.colwise().sum().cwiseAbs().maxCoeff(), 1e-9);
  const Eigen::MatrixXd z = block.smooth.null_space();
  EXPECT_LT((z.transpose() * z - Eigen::MatrixXd::Identity(9, 9)).norm(), 1e-12);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(block.penalty);
  EXPECT_EQ(lu.rank(), 10 - 2);
  EXPECT_EQ(block.smooth.penalty_null_dim(), 1);
}

TEST(ConstrainedSmooth, DesignRowMatchesBatchRows) {
  const auto x = random_x(50, 6);
  const ConstrainedSmooth s = make_smooth(x, {"x", 8, 3, 2});
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(x.size()), s.columns());
  s.design_rows(x, rows);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_LT((rows.row(static_cast<Eigen::Index>(i)) - s.design_row(x[i])).norm(), 1e-14);
}

TEST(MakeSmooth, ConstantCovariateIsRejected) {
  const std::vector<double> x(100, 3.0);
  try {
    make_smooth(x, {"pub_date", 20, 3, 2});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("too few distinct values"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("pub_date"), std::string::npos);
  }
  EXPECT_THROW(make_smooth(random_x(100, 7), {"x", 4, 3, 2}), ValidationError);
}

}  // namespace
}  // namespace patsim::gam
