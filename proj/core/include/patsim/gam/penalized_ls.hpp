#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "patsim/error.hpp"

namespace patsim::gam {

class RankDeficientError : public ValidationError {
 public:
  RankDeficientError(const std::string& message, std::vector<std::string> columns)
      : ValidationError(message), columns_(std::move(columns)) {}
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::vector<std::string> columns_;
};

/// Least-squares problem reduced to its triangular factor:
/// X^T X = R^T R, X^T y = R^T f, |y|^2 = |f|^2 + residual_floor.
struct LeastSquaresSystem {
  Eigen::MatrixXd r;
  Eigen::VectorXd f;
  double residual_floor = 0.0;  // RSS of the unpenalized fit
  std::size_t n = 0;
  double tss = 0.0;             // sum of squares about the mean of y
  std::vector<std::string> column_names;

  Eigen::Index columns() const { return r.cols(); }
};

/// Streaming QR of [X | y] folded block by block; memory is O(columns^2)
/// regardless of the number of rows.
class QrAccumulator {
 public:
  explicit QrAccumulator(Eigen::Index columns);

  void add_rows(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);
  /// Folds another accumulator's rows in. Merge order is part of the result
  /// bit pattern, so callers fix it.
  void merge(const QrAccumulator& other);

  Eigen::Index columns() const { return columns_; }
  std::size_t rows() const { return rows_; }

  LeastSquaresSystem finish(std::vector<std::string> column_names = {}) const;

 private:
  void fold(const Eigen::Ref<const Eigen::MatrixXd>& stacked);

  Eigen::Index columns_;
  Eigen::MatrixXd r_;  // (columns + 1) square, upper triangular
  std::size_t rows_ = 0;
  double y_mean_ = 0.0;
  double y_m2_ = 0.0;
};

LeastSquaresSystem make_system(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               std::vector<std::string> column_names = {});

/// S = root^T root acting on columns [offset, offset + root.cols()).
struct PenaltyBlock {
  Eigen::Index offset = 0;
  Eigen::MatrixXd root;

  Eigen::Index width() const { return root.cols(); }
};

struct PenalizedSolution {
  Eigen::VectorXd beta;
  double rss = 0.0;
  double hat_trace = 0.0;
  Eigen::VectorXd edf_columns;     // diag((X^T X + S)^-1 X^T X)
  Eigen::MatrixXd r_penalized_inv; // (X^T X + S)^-1 = Rp^-1 Rp^-T
};

/// Throws RankDeficientError listing the columns that are (numerically)
/// linear combinations of the others.
void check_full_rank(const LeastSquaresSystem& system);

/// argmin |y - X b|^2 + sum_j lambda_j b^T S_j b. The hat-matrix trace is
/// obtained from the triangular factors, never from an n x n matrix.
PenalizedSolution fit_penalized_ls(const LeastSquaresSystem& system, std::span<const PenaltyBlock> penalties,
                                   std::span<const double> lambda);

}  // namespace patsim::gam
