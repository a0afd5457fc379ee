#pragma once

#include <string>
#include <vector>

namespace patsim::gam {

/// Penalized B-spline smooth of one covariate.
struct SmoothTerm {
  std::string feature;
  int basis_size = 20;    // q
  int degree = 3;
  int penalty_order = 2;  // order of the coefficient difference penalty

  bool operator==(const SmoothTerm&) const = default;
};

/// Intercept (always present) + linear terms + smooth terms.
struct ModelSpec {
  std::vector<std::string> linear_terms;
  std::vector<SmoothTerm> smooth_terms;

  /// Throws ValidationError on duplicated covariates, a covariate used both
  /// linearly and smoothly, or a smooth with q <= degree + 1.
  void validate() const;

  bool operator==(const ModelSpec&) const = default;
};

struct SmoothDefaults {
  int basis_size = 20;
  int degree = 3;
  int penalty_order = 2;
};

/// The nested specifications of Models 0-3. Throws ValidationError for any
/// other level.
///   0: s(pub_date)
///   1: + s(temporal_diff_days)
///   2: + s(log_sender_citations) + is_same_org, is_sender_org, is_receiver_org
///   3: + j_section, j_class, j_subclass, j_maingroup, j_subgroup
ModelSpec model_catalog(int level, const SmoothDefaults& defaults = {});

}  // namespace patsim::gam
