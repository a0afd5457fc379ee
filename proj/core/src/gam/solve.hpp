#pragma once

#include "patsim/gam/penalized_ls.hpp"

namespace patsim::gam::detail {

/// fit_penalized_ls without the up-front rank check. With full = false only
/// beta, rss and hat_trace are filled.
PenalizedSolution solve_penalized(const LeastSquaresSystem& system, std::span<const PenaltyBlock> penalties,
                                  std::span<const double> lambda, bool full);

}  // namespace patsim::gam::detail
