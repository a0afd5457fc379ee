#pragma once

#include <span>
#include <vector>

#include "patsim/gam/penalized_ls.hpp"

namespace patsim::gam {

/// n * RSS / (n - tr H)^2
double gcv_score(double rss, double hat_trace, std::size_t n);

struct LambdaSearchOptions {
  double log_lambda_min = -8.0;  // natural log
  double log_lambda_max = 12.0;
  double rel_tol = 1e-7;         // relative GCV change between cycles
  int max_cycles = 50;
  int scan_points = 21;          // coarse bracket scan before each golden section
  double log_tol = 1e-5;         // golden-section interval width in log lambda
};

struct LambdaSearchResult {
  std::vector<double> lambda;
  double gcv = 0.0;
  int cycles = 0;
  bool converged = false;
};

/// Minimizes GCV one smoothing parameter at a time over log lambda:
/// a coarse scan brackets the best point, golden-section search refines it,
/// and coordinates are cycled until GCV stops improving. Deterministic.
/// When max_cycles is exhausted the best point found is returned with
/// converged = false.
LambdaSearchResult optimize_lambda(const LeastSquaresSystem& system, std::span<const PenaltyBlock> penalties,
                                   const LambdaSearchOptions& options = {});

}  // namespace patsim::gam
