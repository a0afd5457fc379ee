#include "patsim/gam/penalized_ls.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "solve.hpp"

namespace patsim::gam {

QrAccumulator::QrAccumulator(Eigen::Index columns)
    : columns_(columns), r_(Eigen::MatrixXd::Zero(columns + 1, columns + 1)) {}

void QrAccumulator::fold(const Eigen::Ref<const Eigen::MatrixXd>& stacked) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
  r_ = qr.matrixQR().topRows(columns_ + 1).triangularView<Eigen::Upper>();
}

void QrAccumulator::add_rows(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.cols() != columns_ || x.rows() != y.size())
    throw std::invalid_argument("QrAccumulator: block shape mismatch");
  if (x.rows() == 0) return;
  Eigen::MatrixXd stacked(columns_ + 1 + x.rows(), columns_ + 1);
  stacked.topRows(columns_ + 1) = r_;
  stacked.bottomLeftCorner(x.rows(), columns_) = x;
  stacked.bottomRightCorner(x.rows(), 1) = y;
  fold(stacked);

  // Chan et al. pairwise update of the response mean and centered sum of squares.
  const double m = static_cast<double>(x.rows());
  const double block_mean = y.mean();
  const double block_m2 = (y.array() - block_mean).square().sum();
  const double n = static_cast<double>(rows_);
  const double delta = block_mean - y_mean_;
  y_mean_ += delta * m / (n + m);
  y_m2_ += block_m2 + delta * delta * n * m / (n + m);
  rows_ += x.rows();
}

void QrAccumulator::merge(const QrAccumulator& other) {
  if (other.columns_ != columns_) throw std::invalid_argument("QrAccumulator: column mismatch");
  if (other.rows_ == 0) return;
  Eigen::MatrixXd stacked(2 * (columns_ + 1), columns_ + 1);
  stacked << r_, other.r_;
  fold(stacked);
  const double n = static_cast<double>(rows_);
  const double m = static_cast<double>(other.rows_);
  const double delta = other.y_mean_ - y_mean_;
  y_mean_ += delta * m / (n + m);
  y_m2_ += other.y_m2_ + delta * delta * n * m / (n + m);
  rows_ += other.rows_;
}

LeastSquaresSystem QrAccumulator::finish(std::vector<std::string> column_names) const {
  LeastSquaresSystem s;
  s.r = r_.topLeftCorner(columns_, columns_);
  s.f = r_.col(columns_).head(columns_);
  s.residual_floor = r_(columns_, columns_) * r_(columns_, columns_);
  s.n = rows_;
  s.tss = y_m2_;
  if (column_names.empty())
    for (Eigen::Index j = 0; j < columns_; ++j) column_names.push_back("x" + std::to_string(j));
  s.column_names = std::move(column_names);
  return s;
}

LeastSquaresSystem make_system(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               std::vector<std::string> column_names) {
  QrAccumulator acc(x.cols());
  acc.add_rows(x, y);
  return acc.finish(std::move(column_names));
}

void check_full_rank(const LeastSquaresSystem& system) {
  const Eigen::Index p = system.columns();
  std::vector<std::string> bad;
  Eigen::VectorXd norms = system.r.colwise().norm();
  for (Eigen::Index j = 0; j < p; ++j)
    if (norms(j) == 0.0) bad.push_back(system.column_names[static_cast<std::size_t>(j)]);
  if (bad.empty()) {
    const Eigen::MatrixXd scaled = system.r * norms.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(1e-10);
    for (Eigen::Index k = qr.rank(); k < p; ++k)
      bad.push_back(system.column_names[static_cast<std::size_t>(qr.colsPermutation().indices()(k))]);
  }
  if (bad.empty()) return;
  std::string list;
  for (const std::string& name : bad) list += (list.empty() ? "" : ", ") + name;
  throw RankDeficientError("design matrix is rank deficient; collinear columns: " + list, std::move(bad));
}

namespace detail {

PenalizedSolution solve_penalized(const LeastSquaresSystem& system, std::span<const PenaltyBlock> penalties,
                                  std::span<const double> lambda, bool full) {
  const Eigen::Index p = system.columns();
  if (lambda.size() != penalties.size())
    throw std::invalid_argument("fit_penalized_ls: one lambda per penalty block required");
  Eigen::Index m = 0;
  for (std::size_t j = 0; j < penalties.size(); ++j) {
    if (!(lambda[j] >= 0.0)) throw ValidationError("fit_penalized_ls: lambda must be non-negative");
    if (penalties[j].offset < 0 || penalties[j].offset + penalties[j].width() > p)
      throw std::invalid_argument("fit_penalized_ls: penalty block outside the design");
    m += penalties[j].root.rows();
  }

  // [sqrt(lambda) E; R], penalty rows leading.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + p, p);
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < penalties.size(); ++j) {
    const PenaltyBlock& block = penalties[j];
    a.block(row, block.offset, block.root.rows(), block.width()) = std::sqrt(lambda[j]) * block.root;
    row += block.root.rows();
  }
  a.bottomRows(p) = system.r;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + p);
  rhs.tail(p) = system.f;

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd rp = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const double max_diag = rp.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < p; ++j)
    if (!(std::abs(rp(j, j)) > 1e-13 * max_diag)) {
      check_full_rank(system);
      throw RankDeficientError("penalized system is singular at column " +
                                   system.column_names[static_cast<std::size_t>(j)],
                               {system.column_names[static_cast<std::size_t>(j)]});
    }
  const Eigen::VectorXd g = (qr.householderQ().adjoint() * rhs).head(p);

  PenalizedSolution sol;
  const auto upper = rp.triangularView<Eigen::Upper>();
  sol.beta = upper.solve(g);
  sol.rss = system.residual_floor + (system.f - system.r * sol.beta).squaredNorm();

  const Eigen::MatrixXd rinv = upper.solve(Eigen::MatrixXd::Identity(p, p));
  if (!full) {
    sol.hat_trace = (system.r * rinv).squaredNorm();
    return sol;
  }
  // F = (X^T X + S)^-1 X^T X; its trace is the hat-matrix trace.
  const Eigen::MatrixXd v = rinv * rinv.transpose();
  const Eigen::MatrixXd xtx = system.r.transpose() * system.r;
  sol.edf_columns = (v * xtx).diagonal();
  sol.hat_trace = sol.edf_columns.sum();
  sol.r_penalized_inv = rinv;
  return sol;
}

}  // namespace detail

PenalizedSolution fit_penalized_ls(const LeastSquaresSystem& system, std::span<const PenaltyBlock> penalties,
                                   std::span<const double> lambda) {
  check_full_rank(system);
  return detail::solve_penalized(system, penalties, lambda, true);
}

}  // namespace patsim::gam
