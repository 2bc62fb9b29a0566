#include "jamlab/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jamlab {

namespace {

void require_q(int q) {
  if (q < 2) throw std::invalid_argument("alphabet size must be at least 2, got " + std::to_string(q));
}

}  // namespace

double q_entropy(double x, int q) {
  require_q(q);
  const double top = 1.0 - 1.0 / q;
  if (x < -kSlack || x > top + kSlack)
    throw std::domain_error("entropy argument " + std::to_string(x) +
                            " outside [0, " + std::to_string(top) + "]");
  x = std::clamp(x, 0.0, top);
  if (x == 0.0) return 0.0;
  if (x == top) return 1.0;
  const double nats =
      x * std::log(double(q - 1)) - x * std::log(x) - (1.0 - x) * std::log1p(-x);
  return nats / std::log(double(q));
}

double inverse_q_entropy(double y, int q) {
  require_q(q);
  if (y < -kSlack || y > 1.0 + kSlack)
    throw std::domain_error("entropy value " + std::to_string(y) + " outside [0, 1]");
  y = std::clamp(y, 0.0, 1.0);
  const double top = 1.0 - 1.0 / q;
  if (y == 0.0) return 0.0;
  if (y == 1.0) return top;
  double lo = 0.0, hi = top;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    double mid = 0.5 * (lo + hi);
    (q_entropy(mid, q) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BigInt hamming_ball_volume(long n, long r, int q) {
  require_q(q);
  if (n < 0 || r < 0 || r > n)
    throw std::invalid_argument("ball radius must satisfy 0 <= r <= n");
  BigInt total = 1;  // i = 0 term
  BigInt term = 1;   // C(n,i) (q-1)^i
  for (long i = 1; i <= r; ++i) {
    term *= n - i + 1;
    term *= q - 1;
    term /= i;  // exact: C(n,i-1)*(n-i+1) is divisible by i
    total += term;
  }
  return total;
}

long long plotkin_bound(long long n, long long d, long long q) {
  if (q < 2 || n < 1 || d < 1) throw std::invalid_argument("need q >= 2, n >= 1, d >= 1");
  const long long gap = q * d - (q - 1) * n;
  if (gap <= 0)
    throw std::domain_error("distance not above the critical fraction: q*d must exceed (q-1)*n");
  return (q * d) / gap;
}

EntropyShiftBound entropy_shift_bound(double x, double delta, int q) {
  require_q(q);
  if (!(delta > 0.0) || !(delta < 0.5))
    throw std::domain_error("shift must lie strictly inside (0, 1/2)");
  const double top = 1.0 - 1.0 / q;
  if (x < -kSlack || x + delta > top + kSlack)
    throw std::domain_error("shifted argument leaves the entropy domain");
  EntropyShiftBound out;
  out.shifted = q_entropy(std::min(x + delta, top), q);
  out.bound = q_entropy(std::max(x, 0.0), q) +
              (2.0 * std::sqrt(delta) + delta * std::log(double(q - 1))) /
                  std::log(double(q));
  return out;
}

}  // namespace jamlab
