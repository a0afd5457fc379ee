#include "patsim/gam/bspline.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "patsim/error.hpp"

namespace patsim::gam {

namespace {

std::vector<double> distinct_sorted(std::span<const double> x) {
  std::vector<double> u(x.begin(), x.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

constexpr int kMaxDegree = 10;

}  // namespace

BSplineBasis::BSplineBasis(std::vector<double> knots, int degree) : knots_(std::move(knots)), degree_(degree) {
  if (degree_ < 0 || degree_ > kMaxDegree) throw ValidationError("bspline: degree must be in [0, 10]");
  if (static_cast<int>(knots_.size()) < 2 * (degree_ + 1))
    throw ValidationError("bspline: knot vector too short for degree " + std::to_string(degree_));
  if (!std::is_sorted(knots_.begin(), knots_.end())) throw ValidationError("bspline: knots must be non-decreasing");
  if (!(lower() < upper())) throw ValidationError("bspline: empty knot span");
}

BSplineBasis BSplineBasis::with_quantile_knots(std::span<const double> x, int basis_size, int degree) {
  if (basis_size <= degree + 1)
    throw ValidationError("bspline: basis size must exceed degree + 1");
  const std::vector<double> u = distinct_sorted(x);
  if (static_cast<int>(u.size()) < basis_size)
    throw ValidationError("bspline: too few distinct values (" + std::to_string(u.size()) + " < " +
                          std::to_string(basis_size) + ")");
  const int interior = basis_size - degree - 1;
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(basis_size + degree + 1));
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), u.front());
  const double last = static_cast<double>(u.size() - 1);
  for (int j = 1; j <= interior; ++j) {
    const double pos = last * j / (interior + 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    const double v = lo + 1 < u.size() ? u[lo] + frac * (u[lo + 1] - u[lo]) : u[lo];
    knots.push_back(v);
  }
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), u.back());
  return BSplineBasis(std::move(knots), degree);
}

int BSplineBasis::evaluate_local(double x, std::span<double> local) const {
  const int p = degree_;
  const int n = size();
  x = std::clamp(x, lower(), upper());

  // knot span i with t_i <= x < t_{i+1}, p <= i <= n - 1
  int span;
  if (x >= upper()) {
    span = n - 1;
  } else {
    auto it = std::upper_bound(knots_.begin() + p, knots_.begin() + n, x);
    span = static_cast<int>(it - knots_.begin()) - 1;
  }

  std::array<double, kMaxDegree + 1> left{}, right{};
  local[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom != 0.0 ? local[r] / denom : 0.0;
      local[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    local[j] = saved;
  }
  return span - p;
}

void BSplineBasis::evaluate(double x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  std::array<double, kMaxDegree + 1> local{};
  const int first = evaluate_local(x, local);
  for (int k = 0; k <= degree_; ++k) out[first + k] = local[k];
}

Eigen::MatrixXd BSplineBasis::design(std::span<const double> x) const {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()), size());
  std::array<double, kMaxDegree + 1> local{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int first = evaluate_local(x[i], local);
    for (int k = 0; k <= degree_; ++k) b(static_cast<Eigen::Index>(i), first + k) = local[k];
  }
  return b;
}

Eigen::MatrixXd difference_matrix(int size, int order) {
  if (order < 0 || order >= size) throw ValidationError("difference order must be in [0, size)");
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(size, size);
  for (int k = 0; k < order; ++k) {
    const Eigen::MatrixXd prev = d;
    d = prev.bottomRows(prev.rows() - 1) - prev.topRows(prev.rows() - 1);
  }
  return d;
}

Eigen::MatrixXd difference_matrix(std::span<const double> abscissae, int order) {
  const int size = static_cast<int>(abscissae.size());
  if (order < 0 || order >= size) throw ValidationError("difference order must be in [0, size)");
  for (int i = 1; i < size; ++i)
    if (!(abscissae[i] > abscissae[i - 1])) throw ValidationError("abscissae must be strictly increasing");
  // Spacing in units of the mean gap.
  const double gap = (abscissae.back() - abscissae.front()) / (size - 1);
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(size, size);
  for (int k = 1; k <= order; ++k) {
    const Eigen::MatrixXd prev = d;
    d = prev.bottomRows(prev.rows() - 1) - prev.topRows(prev.rows() - 1);
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      d.row(i) *= k * gap / (abscissae[static_cast<std::size_t>(i + k)] - abscissae[static_cast<std::size_t>(i)]);
  }
  return d;
}

std::vector<double> BSplineBasis::greville() const {
  std::vector<double> g(static_cast<std::size_t>(size()));
  for (int k = 0; k < size(); ++k) {
    if (degree_ == 0) {
      g[static_cast<std::size_t>(k)] = 0.5 * (knots_[k] + knots_[k + 1]);
      continue;
    }
    double sum = 0;
    for (int j = 1; j <= degree_; ++j) sum += knots_[k + j];
    g[static_cast<std::size_t>(k)] = sum / degree_;
  }
  return g;
}

ConstrainedSmooth::ConstrainedSmooth(BSplineBasis basis, std::span<const double> x, int penalty_order)
    : basis_(std::move(basis)), penalty_order_(penalty_order) {
  const int q = basis_.size();
  if (penalty_order_ < 1 || penalty_order_ >= q) throw ValidationError("smooth: penalty order must be in [1, q)");

  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(q);
  std::array<double, kMaxDegree + 1> local{};
  for (double xi : x) {
    const int first = basis_.evaluate_local(xi, local);
    for (int k = 0; k <= basis_.degree(); ++k) colsum(first + k) += local[k];
  }
  if (colsum.norm() == 0.0) throw ValidationError("smooth: no data inside the knot span");

  const Eigen::MatrixXd constraint = colsum;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(constraint);
  const Eigen::MatrixXd full_q = qr.householderQ() * Eigen::MatrixXd::Identity(q, q);
  null_space_ = full_q.rightCols(q - 1);
  penalty_root_ = difference_matrix(basis_.greville(), penalty_order_) * null_space_;
}

Eigen::RowVectorXd ConstrainedSmooth::design_row(double x) const {
  std::array<double, kMaxDegree + 1> local{};
  const int first = basis_.evaluate_local(x, local);
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(columns());
  for (int k = 0; k <= basis_.degree(); ++k) row.noalias() += local[k] * null_space_.row(first + k);
  return row;
}

void ConstrainedSmooth::design_rows(std::span<const double> x, Eigen::Ref<Eigen::MatrixXd> out) const {
  std::array<double, kMaxDegree + 1> local{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int first = basis_.evaluate_local(x[i], local);
    auto row = out.row(static_cast<Eigen::Index>(i));
    row.setZero();
    for (int k = 0; k <= basis_.degree(); ++k) row.noalias() += local[k] * null_space_.row(first + k);
  }
}

ConstrainedSmooth make_smooth(std::span<const double> x, const SmoothTerm& term) {
  if (term.basis_size <= term.degree + 1)
    throw ValidationError(term.feature + ": basis size " + std::to_string(term.basis_size) +
                          " must exceed degree + 1");
  const std::size_t distinct = distinct_sorted(x).size();
  if (distinct < static_cast<std::size_t>(term.basis_size))
    throw ValidationError(term.feature + ": too few distinct values (" + std::to_string(distinct) + " < " +
                          std::to_string(term.basis_size) + ")");
  return ConstrainedSmooth(BSplineBasis::with_quantile_knots(x, term.basis_size, term.degree), x,
                           term.penalty_order);
}

BasisBlock build_basis(std::span<const double> x, const SmoothTerm& term) {
  ConstrainedSmooth smooth = make_smooth(x, term);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(x.size()), smooth.columns());
  smooth.design_rows(x, design);
  Eigen::MatrixXd penalty = smooth.penalty();
  return {std::move(smooth), std::move(design), std::move(penalty)};
}

}  // namespace patsim::gam
