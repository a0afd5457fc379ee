#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "patsim/features.hpp"
#include "patsim/gam/bspline.hpp"
#include "patsim/gam/lambda_search.hpp"
#include "patsim/gam/spec.hpp"

namespace patsim::gam {

/// Column-oriented model input.
struct Dataset {
  std::vector<double> response;
  std::map<std::string, std::vector<double>, std::less<>> columns;
  std::size_t dropped_rows = 0;

  std::size_t size() const { return response.size(); }
};

/// Extracts the response and the model's covariates. Rows with an undefined
/// Jaccard profile are dropped (and counted) when the spec uses any j_* term.
Dataset dataset_from_features(const features::FeatureTable& table, const ModelSpec& spec);

struct FitOptions {
  LambdaSearchOptions search;
  std::size_t block_rows = 4096;
  unsigned workers = 1;
  std::vector<double> fixed_lambda;  // one per smooth; empty = select by GCV
  bool keep_fitted = true;
};

struct SmoothFit {
  SmoothTerm term;
  ConstrainedSmooth smooth;
  Eigen::Index offset = 0;
  double lambda = 0.0;
  double edf = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
};

struct ModelFit {
  ModelSpec spec;
  int model_level = -1;  // catalog level, -1 for ad-hoc specs
  std::size_t n = 0;
  std::size_t dropped_rows = 0;

  std::vector<std::string> column_names;
  Eigen::VectorXd beta;
  Eigen::MatrixXd cov_beta;  // (X^T X + S)^-1 * sigma2_hat
  Eigen::VectorXd edf_columns;
  double edf_total = 0.0;
  std::vector<SmoothFit> smooths;

  double rss = 0.0;
  double tss = 0.0;
  double sigma2_hat = 0.0;  // rss / (n - edf_total)
  double aic = 0.0;
  double gcv = 0.0;
  double dev_explained = 0.0;

  bool converged = true;
  int lambda_cycles = 0;
  std::vector<double> fitted;

  Eigen::VectorXd standard_errors() const { return cov_beta.diagonal().cwiseSqrt(); }
  const SmoothFit* find_smooth(std::string_view feature) const;
};

/// Builds intercept + linear + constrained smooth columns in row blocks,
/// selects smoothing parameters by GCV and summarizes the fit.
/// AIC = n ln(RSS/n) + n ln(2 pi) + n + 2 (edf_total + 1).
ModelFit fit_model(const ModelSpec& spec, const Dataset& data, const FitOptions& options = {});
ModelFit fit_model(const ModelSpec& spec, const features::FeatureTable& table, const FitOptions& options = {});

/// Centered smooth on an evenly spaced grid over the observed range with
/// pointwise standard errors from cov_beta.
struct PartialEffect {
  std::string term;
  std::vector<double> grid;
  std::vector<double> f_hat;
  std::vector<double> se;
};

/// Throws ValidationError for a term that is not a smooth of the fit.
PartialEffect partial_effect(const ModelFit& fit, std::string_view term, std::size_t grid_size = 100);

}  // namespace patsim::gam
