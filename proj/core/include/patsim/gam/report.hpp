#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "patsim/gam/model.hpp"

namespace patsim::gam {

struct CoefficientRow {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double p_value = 1.0;
  std::string stars;

  bool operator==(const CoefficientRow&) const = default;
};

struct SmoothRow {
  std::string name;
  double lambda = 0.0;
  double edf = 0.0;

  bool operator==(const SmoothRow&) const = default;
};

/// Parametric coefficients, smooth terms and assessment criteria of one fit.
struct FitSummary {
  int model_level = -1;
  std::size_t n = 0;
  std::vector<CoefficientRow> coefficients;
  std::vector<SmoothRow> smooths;
  double aic = 0.0;
  double gcv = 0.0;
  double dev_explained = 0.0;
  std::size_t dropped_rows = 0;
  bool converged = true;

  bool operator==(const FitSummary&) const = default;
};

/// Two-sided p-value of estimate/se under a standard normal.
double normal_p_value(double estimate, double se);

/// "***" p < 0.001, "**" < 0.01, "*" < 0.05, "." < 0.1, else "".
std::string significance_stars(double p_value);

FitSummary summarize(const ModelFit& fit);

std::string to_json(const FitSummary& summary);
FitSummary summary_from_json(const std::string& text);

/// grid,f_hat,se_lower,se_upper with bounds at f_hat -/+ 2 se.
void write_partial_effect_csv(std::ostream& out, const PartialEffect& effect);

/// One column per model: estimates (se and stars) of every parametric term,
/// the smooth terms present, then AIC, GCV and deviance explained.
void write_comparison_csv(std::ostream& out, std::span<const FitSummary> fits);
void write_comparison_markdown(std::ostream& out, std::span<const FitSummary> fits);

}  // namespace patsim::gam
