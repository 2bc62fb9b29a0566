#pragma once

#include <optional>

#include "jamlab/params.hpp"

namespace jamlab {

struct CapacityResult {
  double value = 0.0;
  double argmin_pbar = 0.0;
  bool zero_region = false;
};

// Fraction of prefix positions the adversary leaves unerased and uncorrupted
// when it has spent pbar of its error budget early:
//   1 - (2q/(q-1)) (p - pbar) - (q/(q-1)) p_star.
double alpha_q(double pbar, const ChannelParams& params);

/**
 * Objective inside the capacity minimization:
 *   alpha_q(pbar) * (1 - q_entropy(pbar / alpha_q(pbar))).
 * Returns nullopt when pbar is infeasible (alpha <= 0 or the entropy argument
 * exceeds 1 - 1/q beyond slack).
 */
std::optional<double> rate_term(double pbar, const ChannelParams& params);

/**
 * Channel capacity: the minimum of rate_term over pbar in [0, p], or zero
 * when the budgets saturate the region boundary (2p + p_star >= (q-1)/q, or
 * p, p_star, p + p_star outside their closed ranges).  Minimization is a
 * coarse 1024-point bracket scan followed by golden-section refinement down
 * to an interval of 1e-10.
 */
CapacityResult capacity(const ChannelParams& params);

// Brute-force check: evaluates rate_term on a uniform grid over [0, p] and
// returns the best point.  Slow by design; used as an independent oracle.
CapacityResult capacity_grid_oracle(const ChannelParams& params,
                                    long grid_points = 1000000);

enum class SpecialCase { ErasureOnly, ErrorOnly, LargeQ };

// ErasureOnly: 1 - (q/(q-1)) p_star.  ErrorOnly: the minimization with
// p_star = 0.  LargeQ: the limit expression 1 - 2p - p_star.
double special_case_capacity(SpecialCase kind, const ChannelParams& params);

}  // namespace jamlab
