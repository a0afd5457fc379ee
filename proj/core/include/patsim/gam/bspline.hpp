#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "patsim/gam/spec.hpp"

namespace patsim::gam {

/// B-spline basis on a clamped knot vector (boundary knots repeated
/// degree + 1 times). Evaluation uses the Cox-de Boor recursion.
class BSplineBasis {
 public:
  BSplineBasis(std::vector<double> knots, int degree);

  /// `basis_size` functions with boundary knots at min/max of `x` and
  /// interior knots at quantiles of the distinct values of `x`.
  static BSplineBasis with_quantile_knots(std::span<const double> x, int basis_size, int degree);

  int size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  double lower() const { return knots_[degree_]; }
  double upper() const { return knots_[knots_.size() - degree_ - 1]; }

  /// Values of every basis function at `x`; `out` has size() entries.
  /// Points outside [lower, upper] are clamped to the boundary.
  void evaluate(double x, std::span<double> out) const;

  /// First non-zero basis index at `x` (degree + 1 consecutive values are non-zero).
  int evaluate_local(double x, std::span<double> local) const;

  Eigen::MatrixXd design(std::span<const double> x) const;

  /// Knot averages; sum_k greville()[k] * B_k(x) == x on the span.
  std::vector<double> greville() const;

 private:
  std::vector<double> knots_;
  int degree_;
};

/// (size - order) x size matrix of order-th differences.
Eigen::MatrixXd difference_matrix(int size, int order);

/// Divided differences over strictly increasing abscissae, rescaled so that
/// equally spaced abscissae give difference_matrix(size, order). The null
/// space is the polynomials of degree < order in the abscissae.
Eigen::MatrixXd difference_matrix(std::span<const double> abscissae, int order);

/// Smooth with the sum-to-zero constraint over the observed data absorbed
/// by a Householder reparameterization: columns() == basis size - 1 and
/// every fitted curve sums to zero over the data it was built from.
/// The penalty takes divided differences over the Greville abscissae, so an
/// order-2 penalty leaves straight lines in x unpenalized.
class ConstrainedSmooth {
 public:
  ConstrainedSmooth(BSplineBasis basis, std::span<const double> x, int penalty_order);

  const BSplineBasis& basis() const { return basis_; }
  int columns() const { return static_cast<int>(null_space_.cols()); }
  int penalty_order() const { return penalty_order_; }

  /// q x (q-1) basis of the null space of the constraint.
  const Eigen::MatrixXd& null_space() const { return null_space_; }
  /// E with penalty S = E^T E in the constrained parameterization.
  const Eigen::MatrixXd& penalty_root() const { return penalty_root_; }
  Eigen::MatrixXd penalty() const { return penalty_root_.transpose() * penalty_root_; }
  /// Dimension of the penalty null space left after the constraint.
  int penalty_null_dim() const { return penalty_order_ - 1; }

  Eigen::RowVectorXd design_row(double x) const;
  /// Fills out (x.size() x columns()).
  void design_rows(std::span<const double> x, Eigen::Ref<Eigen::MatrixXd> out) const;

 private:
  BSplineBasis basis_;
  int penalty_order_;
  Eigen::MatrixXd null_space_;
  Eigen::MatrixXd penalty_root_;
};

/// Constrained design block and penalty for one smooth term.
struct BasisBlock {
  ConstrainedSmooth smooth;
  Eigen::MatrixXd design;   // n x (q-1)
  Eigen::MatrixXd penalty;  // (q-1) x (q-1)
};

/// Throws ValidationError("<feature>: too few distinct values ...") when x
/// has fewer than q distinct values.
ConstrainedSmooth make_smooth(std::span<const double> x, const SmoothTerm& term);
BasisBlock build_basis(std::span<const double> x, const SmoothTerm& term);

}  // namespace patsim::gam
