#include "jamlab/params.hpp"

#include <cmath>
#include <stdexcept>

#include "jamlab/qmath.hpp"

namespace jamlab {

namespace {

// Slack for float-to-integer roundings of quantities like p*n and n*theta.
constexpr double kIntSlack = 1e-9;

}  // namespace

double ChannelParams::default_theta() const {
  return epsilon * epsilon / (9.0 * double(q) * double(q));
}

void ChannelParams::apply_theoretical_mode() {
  theoretical_mode = true;
  theta = default_theta();
  const double s = theta * theta * theta / (double(q) * double(q));
  double count = std::pow(double(q), double(n) * s);
  secret_count = std::max<long>(2, static_cast<long>(std::ceil(count - kIntSlack)));
}

long ChannelParams::chunk_length() const {
  const double c = double(n) * theta;
  const long lc = std::llround(c);
  if (lc < 1 || std::fabs(c - double(lc)) > kIntSlack * std::max(1.0, c) ||
      n % lc != 0)
    throw std::invalid_argument("n*theta must be a positive integer dividing n");
  return lc;
}

long ChannelParams::chunk_count() const { return n / chunk_length(); }

long ChannelParams::error_cap() const {
  return static_cast<long>(std::floor(p * double(n) + kIntSlack));
}

long ChannelParams::erasure_cap() const {
  return static_cast<long>(std::floor(p_star * double(n) + kIntSlack));
}

long ChannelParams::message_count() const {
  const double bits = double(n) * rate * std::log2(double(q));
  if (bits > 40.0) throw std::length_error("message count q^(n*rate) is out of desk scale");
  const double m = std::pow(double(q), double(n) * rate);
  return std::max<long>(2, std::llround(m));
}

std::vector<long> ChannelParams::chunk_ends() const {
  const long c = chunk_length();
  std::vector<long> ends;
  ends.reserve(static_cast<std::size_t>(n / c));
  for (long t = c; t <= n - c; t += c) ends.push_back(t);
  return ends;
}

std::vector<std::string> ChannelParams::validate(bool needs_block,
                                                 bool needs_region) const {
  std::vector<std::string> errors;
  auto fail = [&errors](const std::string& msg) { errors.push_back(msg); };

  if (q < 2) fail("q must be at least 2");
  if (q > (1 << 20)) fail("q above 2^20 is out of desk scale");
  if (p < 0.0 || p > 1.0) fail("p must lie in [0, 1]");
  if (p_star < 0.0 || p_star > 1.0) fail("pstar must lie in [0, 1]");
  if (p + p_star > 1.0 + kSlack) fail("p + pstar must not exceed 1");
  if (!(epsilon > 0.0) || epsilon > 1.0) fail("epsilon must lie in (0, 1]");
  if (!(margin_scale > 0.0)) fail("margin scale must be positive");

  if (needs_block) {
    if (n < 2) fail("n must be at least 2");
    if (!(theta > 0.0) || theta > 1.0) {
      fail("theta must lie in (0, 1]");
    } else if (n >= 2) {
      const double c = double(n) * theta;
      const long lc = std::llround(c);
      if (lc < 1 || std::fabs(c - double(lc)) > kIntSlack * std::max(1.0, c))
        fail("n*theta must be an integer number of symbols");
      else if (n % lc != 0)
        fail("the chunk length n*theta must divide n");
      else if (lc == n)
        fail("need at least two chunks");
    }
    if (rate < 0.0) fail("rate must be nonnegative");
    if (rate > 0.0 && n >= 2) {
      const double bits = double(n) * rate * std::log2(double(q));
      if (bits > 40.0) fail("q^(n*rate) messages is out of desk scale");
    }
    if (secret_count < 1) fail("secret count must be at least 1");
    if (theoretical_mode &&
        std::fabs(theta - default_theta()) > kSlack * std::max(1.0, theta))
      fail("theoretical mode pins theta to epsilon^2/(9 q^2)");
  }

  if (needs_region && q >= 2) {
    const double edge = (double(q) - 1.0) / double(q);
    if (p > edge / 2.0 + kSlack) fail("p exceeds (q-1)/(2q): outside the positive-capacity region");
    if (p_star > edge + kSlack) fail("pstar exceeds (q-1)/q: outside the positive-capacity region");
    if (p + p_star > edge + kSlack) fail("p + pstar exceeds (q-1)/q: outside the positive-capacity region");
  }

  return errors;
}

}  // namespace jamlab
