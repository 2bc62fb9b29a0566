#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jamlab/params.hpp"

namespace jamlab {

/**
 * Numerical claim suite.
 *
 * Draws random valid parameter points and checks, for each, the analytic
 * statements the decoder relies on:
 *
 *   entropy_shift      the entropy growth bound on a (x, delta) grid
 *   list_energy        both decoder conditions hold at rate C - epsilon for
 *                      every chunk end in the usable range
 *   above_at_stop      at the stop point the reference curve has absorbed the
 *                      whole error budget: (t - lambda) * p_hat_t >= n*p
 *   in_gap             trajectories strictly above the reference at one chunk
 *                      end stay above the lower envelope at the next
 *   suffix_fraction    trajectories above the lower envelope leave a suffix
 *                      error fraction below the consistency threshold
 *   zero_start         trajectories at or under the reference at the first
 *                      usable chunk end satisfy the energy inequality there
 *
 * in_gap, suffix_fraction and zero_start run against synthetic integer
 * corruption trajectories (uniform and front-biased placements under the
 * budgets); the others are direct sweeps.  Chunking uses ceil(1/theta) chunks
 * so the effective chunk fraction never exceeds theta; every checked
 * inequality tightens as chunks shrink, so a pass covers the stated regime.
 */
struct ClaimResult {
  std::string name;
  long draws = 0;
  long checks = 0;
  long violations = 0;
  long skipped = 0;  // degenerate points (for suffix_fraction, empty suffix)
  std::vector<std::string> counterexamples;  // first few, human-readable

  bool pass() const { return violations == 0; }
};

struct VerifyOptions {
  std::vector<int> qs = {2, 3, 4};
  long draws_per_q = 200;
  std::uint64_t seed = 20260822;
  double margin_scale = 1.0;  // fault injection; 1.0 in real use
  bool single_point = false;  // check only the point below
  ChannelParams point;
};

struct VerifyReport {
  std::vector<ClaimResult> claims;
  long total_draws = 0;
  bool all_pass() const {
    for (const auto& c : claims)
      if (!c.pass()) return false;
    return true;
  }
};

VerifyReport run_verify(const VerifyOptions& options);

}  // namespace jamlab
