#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace jamlab {

/**
 * Channel and code parameters shared by every module.
 *
 * p and p_star are the adversary's substitution and erasure budgets as
 * fractions of the block length; epsilon is the rate slack that sizes every
 * margin in the decoding trajectory; theta is the chunk fraction (n*theta
 * symbols per chunk, and the chunk count 1/theta must be an integer).
 */
struct ChannelParams {
  int q = 2;
  double p = 0.0;
  double p_star = 0.0;
  double epsilon = 0.1;
  long n = 0;
  double theta = 0.0;  // 0 means unset; see default_theta()
  double rate = 0.0;
  long secret_count = 1;
  bool theoretical_mode = false;

  // Test-only fault injection: scales the epsilon^2/(9 q^2 alpha^2) margin in
  // the decoding reference trajectory.  Must stay 1.0 in real use.
  double margin_scale = 1.0;

  double default_theta() const;            // epsilon^2 / (9 q^2)
  void apply_theoretical_mode();           // sets theta and secret_count

  long chunk_length() const;               // n * theta, validated integer
  long chunk_count() const;                // n / chunk_length()
  long error_cap() const;                  // floor(p * n)
  long erasure_cap() const;                // floor(p_star * n)
  long message_count() const;              // q^(n*rate) rounded, at least 2

  // Chunk ends available to the decoder: {c, 2c, ..., n-c} with c the chunk
  // length.  The final position n is excluded.
  std::vector<long> chunk_ends() const;

  /**
   * Returns every violated constraint as one human-readable line; empty means
   * valid.  needs_block adds the block-level requirements (n, theta, rate,
   * secret_count); needs_region additionally requires the parameters to lie in
   * the positive-capacity region with closed comparisons.
   */
  std::vector<std::string> validate(bool needs_block = false,
                                    bool needs_region = false) const;
};

}  // namespace jamlab
