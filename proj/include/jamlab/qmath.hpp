#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace jamlab {

using BigInt = boost::multiprecision::cpp_int;

// Absolute slack used for domain checks and closed comparisons throughout the
// numeric core.  All comparisons at region or branch boundaries use this value.
inline constexpr double kSlack = 1e-12;

/**
 * Base-q entropy of a q-ary noise source with flip fraction x:
 *   x log_q(q-1) - x log_q x - (1-x) log_q(1-x).
 * Domain is [0, 1-1/q]; endpoints give 0 and 1.  Arguments within kSlack of
 * the domain are clamped; anything further out throws std::domain_error.
 */
double q_entropy(double x, int q);

// Inverse of q_entropy on [0, 1-1/q] by bisection (q_entropy is strictly
// increasing there).  y outside [0, 1] throws std::domain_error.
double inverse_q_entropy(double y, int q);

// Exact number of q-ary words within Hamming distance r of a fixed word of
// length n: sum_{i=0}^{r} C(n,i) (q-1)^i.
BigInt hamming_ball_volume(long n, long r, int q);

// Largest possible codeword count for minimum distance d beyond the critical
// fraction: floor(qd / (qd - (q-1)n)), valid only when qd > (q-1)n.
long long plotkin_bound(long long n, long long d, long long q);

/**
 * Entropy growth under an argument shift: for delta in (0, 1/2),
 *   q_entropy(x + delta)  <  q_entropy(x) + (2 sqrt(delta) + delta ln(q-1)) / ln q.
 * Returns both sides so callers can assert or measure the margin.
 */
struct EntropyShiftBound {
  double shifted;  // q_entropy(x + delta)
  double bound;    // q_entropy(x) + (2 sqrt(delta) + delta ln(q-1)) / ln q
};
EntropyShiftBound entropy_shift_bound(double x, double delta, int q);

}  // namespace jamlab
