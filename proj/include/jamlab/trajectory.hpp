#pragma once

#include <string>
#include <vector>

#include "jamlab/params.hpp"

namespace jamlab {

/**
 * Decoding trajectories.
 *
 * Throughout, t is a prefix length, lambda_t the number of erasures in that
 * prefix, and x = (t - lambda_t)/n the unerased prefix fraction.  The three
 * curves below drive the iterative decoder:
 *
 *   p_bar_t   worst-case budget-balanced error fraction the adversary can
 *             still afford at this point,
 *   p_hat_t   reference fraction the decoder list-decodes against,
 *   p_tilde_t lower envelope separating trajectories that have crossed
 *             under p_hat_t from those that have not.
 *
 * p_hat_t and p_tilde_t are defined for x >= alpha_q(0) - epsilon^2/4 and up
 * to x <= 1 - (q/(q-1)) p_star; outside that they throw std::domain_error.
 * Note p_hat_t depends on t and lambda_t only through x, and that
 * alpha_q(p_bar_t) == x identically, which is how the branch formulas below
 * are evaluated.
 */
double p_bar_t(double t, double lambda_t, const ChannelParams& params);
double p_hat_t(double t, double lambda_t, const ChannelParams& params);
double p_tilde_t(double t, double lambda_t, const ChannelParams& params);

// Domain of the reference trajectory in terms of x = (t - lambda_t)/n.
double p_hat_floor_x(const ChannelParams& params);  // alpha_q(0) - epsilon^2/4
double p_hat_top_x(const ChannelParams& params);    // 1 - (q/(q-1)) p_star

/**
 * Erasure profiles list cumulative erasure counts at each chunk end
 * {c, 2c, ..., n-c}; an empty profile means no erasures.  t_zero returns the
 * first chunk end whose unerased prefix reaches n*(alpha_q(0) - epsilon^2/4);
 * stop_point the last chunk end with t - lambda_t <= n - (q/(q-1))*n*p_star
 * - n*theta.  Both throw std::runtime_error when no chunk end qualifies.
 */
long t_zero(const std::vector<long>& lambda_profile, const ChannelParams& params);
long stop_point(const std::vector<long>& lambda_profile, const ChannelParams& params);

/**
 * The two inequalities that make an iteration point usable at rate R:
 *   list:   (t-lambda)(1 - q_entropy(p_hat_t)) - n*epsilon/4 >= n*R
 *   energy: n*p - (t-lambda)*p_hat_t + (n-t)*epsilon^2/(9q^2)
 *             <= ((q-1)/(2q)) * (n - n*p_star - t + lambda)
 * Comparisons are evaluated normalized by n with kSlack toward satisfaction.
 */
struct ConditionCheck {
  bool list_ok = false;
  bool energy_ok = false;
};
ConditionCheck check_conditions(double t, double lambda_t,
                                const ChannelParams& params, double rate);

// Cumulative corruption counts observed at one chunk end.
struct ChunkRecord {
  long t = 0;         // prefix length (a chunk end)
  long errors = 0;    // substituted symbols in the prefix
  long erasures = 0;  // erased symbols in the prefix
};

/**
 * A full per-chunk-end account of what the adversary did to one word.
 * p_at(i) is the exact error fraction over unerased prefix positions at
 * record i (zero when the unerased prefix is empty).
 */
struct CorruptionTrajectory {
  std::vector<ChunkRecord> records;
  double p_at(std::size_t i) const;
  std::vector<long> lambda_profile() const;
};

enum class TrajectoryType { Low, High };

struct TstarResult {
  TrajectoryType type = TrajectoryType::Low;
  long t_star = 0;
};

/**
 * Classifies a trajectory by comparing its error fraction at t_zero against
 * the reference curve, and locates the decoding point t_star: t_zero itself
 * for Low trajectories, the first chunk end where the trajectory comes back
 * under the reference (strictly above one chunk earlier) for High ones.
 */
TstarResult classify_and_find_tstar(const CorruptionTrajectory& traj,
                                    const ChannelParams& params);

/**
 * Data behind the admissible-region plot: extremal error-fraction curves for
 * the adversary under its budget, the ceiling on the reference curve imposed
 * by the list inequality, the floor imposed by the energy inequality, and the
 * reference curve itself.  Sampled at chunk ends plus the final position,
 * with zero erasures; rows where a curve is undefined are omitted.
 */
struct RegionRow {
  std::string curve;       // calvin_upper | calvin_lower | list_ceiling |
                           // energy_floor | p_hat
  double t = 0.0;
  double t_minus_lambda = 0.0;
  double value = 0.0;
};
std::vector<RegionRow> region_curves(const ChannelParams& params, double rate);

}  // namespace jamlab
