#include "patsim/gam/lambda_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "solve.hpp"

namespace patsim::gam {

double gcv_score(double rss, double hat_trace, std::size_t n) {
  const double dn = static_cast<double>(n);
  const double denom = dn - hat_trace;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return dn * rss / (denom * denom);
}

LambdaSearchResult optimize_lambda(const LeastSquaresSystem& system, std::span<const PenaltyBlock> penalties,
                                   const LambdaSearchOptions& options) {
  check_full_rank(system);
  const std::size_t k = penalties.size();
  const double lo = options.log_lambda_min;
  const double hi = options.log_lambda_max;

  std::vector<double> rho(k, 0.5 * (lo + hi));
  std::vector<double> lambda(k);
  auto gcv_at = [&](const std::vector<double>& r) {
    for (std::size_t j = 0; j < k; ++j) lambda[j] = std::exp(r[j]);
    const PenalizedSolution sol = detail::solve_penalized(system, penalties, lambda, false);
    return gcv_score(sol.rss, sol.hat_trace, system.n);
  };

  LambdaSearchResult result;
  double best = gcv_at(rho);
  if (k == 0) {
    result.gcv = best;
    result.converged = true;
    return result;
  }

  const int scan = std::max(3, options.scan_points);
  const double step = (hi - lo) / (scan - 1);
  constexpr double kInvPhi = 0.6180339887498949;

  for (int cycle = 1; cycle <= options.max_cycles; ++cycle) {
    const double previous = best;
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> trial = rho;
      auto value_at = [&](double r) {
        trial[j] = r;
        return gcv_at(trial);
      };

      int best_i = 0;
      double best_scan = std::numeric_limits<double>::infinity();
      for (int i = 0; i < scan; ++i) {
        const double v = value_at(lo + i * step);
        if (v < best_scan) {
          best_scan = v;
          best_i = i;
        }
      }
      double a = lo + std::max(best_i - 1, 0) * step;
      double b = lo + std::min(best_i + 1, scan - 1) * step;
      double c = b - kInvPhi * (b - a);
      double d = a + kInvPhi * (b - a);
      double fc = value_at(c);
      double fd = value_at(d);
      while (b - a > options.log_tol) {
        if (fc <= fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - kInvPhi * (b - a);
          fc = value_at(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + kInvPhi * (b - a);
          fd = value_at(d);
        }
      }
      double candidate = fc <= fd ? c : d;
      double candidate_value = std::min(fc, fd);
      if (best_scan < candidate_value) {
        candidate = lo + best_i * step;
        candidate_value = best_scan;
      }
      if (candidate_value < best) {
        rho[j] = candidate;
        best = candidate_value;
      }
    }
    result.cycles = cycle;
    if (std::abs(previous - best) <= options.rel_tol * std::abs(best)) {
      result.converged = true;
      break;
    }
  }

  result.gcv = best;
  result.lambda.resize(k);
  for (std::size_t j = 0; j < k; ++j) result.lambda[j] = std::exp(rho[j]);
  return result;
}

}  // namespace patsim::gam
