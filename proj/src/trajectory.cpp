#include "jamlab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "jamlab/capacity.hpp"
#include "jamlab/qmath.hpp"

namespace jamlab {

namespace {

double unerased_fraction(double t, double lambda_t, const ChannelParams& pr) {
  if (lambda_t < -kSlack || lambda_t > t + kSlack || t > double(pr.n) + kSlack || t < -kSlack)
    throw std::domain_error("need 0 <= lambda_t <= t <= n");
  return (t - lambda_t) / double(pr.n);
}

double margin_coeff(const ChannelParams& pr) {  // epsilon^2 / (9 q^2)
  return pr.epsilon * pr.epsilon / (9.0 * double(pr.q) * double(pr.q));
}

void check_reference_domain(double x, const ChannelParams& pr) {
  if (x < p_hat_floor_x(pr) - kSlack || x > p_hat_top_x(pr) + kSlack)
    throw std::domain_error("unerased fraction " + std::to_string(x) +
                            " outside the reference-trajectory domain");
  if (x <= 0.0) throw std::domain_error("reference trajectory needs a nonempty unerased prefix");
}

const std::vector<long>& resolve_profile(const std::vector<long>& profile,
                                         std::vector<long>& scratch,
                                         const std::vector<long>& ends) {
  if (profile.empty()) {
    scratch.assign(ends.size(), 0);
    return scratch;
  }
  if (profile.size() < ends.size())
    throw std::invalid_argument("erasure profile shorter than the chunk-end list");
  long prev = 0;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (profile[i] < prev || profile[i] > ends[i])
      throw std::invalid_argument("erasure profile must be nondecreasing with lambda_t <= t");
    prev = profile[i];
  }
  return profile;
}

}  // namespace

double p_bar_t(double t, double lambda_t, const ChannelParams& pr) {
  const double x = unerased_fraction(t, lambda_t, pr);
  const double qd = double(pr.q);
  return pr.p + pr.p_star / 2.0 - ((qd - 1.0) / (2.0 * qd)) * (1.0 - x);
}

double p_hat_floor_x(const ChannelParams& pr) {
  return alpha_q(0.0, pr) - pr.epsilon * pr.epsilon / 4.0;
}

double p_hat_top_x(const ChannelParams& pr) {
  return 1.0 - double(pr.q) / (double(pr.q) - 1.0) * pr.p_star;
}

double p_hat_t(double t, double lambda_t, const ChannelParams& pr) {
  const double x = unerased_fraction(t, lambda_t, pr);
  check_reference_domain(x, pr);
  const double a0 = alpha_q(0.0, pr);
  const double mc = pr.margin_scale * margin_coeff(pr);
  if (x < a0) return mc / (a0 * a0);
  // Here alpha_q(p_bar_t) == x identically, so the branch is evaluated with
  // the exact unerased fraction instead of re-deriving alpha.
  return p_bar_t(t, lambda_t, pr) / x + mc / (x * x);
}

double p_tilde_t(double t, double lambda_t, const ChannelParams& pr) {
  const double x = unerased_fraction(t, lambda_t, pr);
  check_reference_domain(x, pr);
  const double n = double(pr.n);
  return p_bar_t(t, lambda_t, pr) / x + (n - t) * margin_coeff(pr) / (t - lambda_t);
}

long t_zero(const std::vector<long>& lambda_profile, const ChannelParams& pr) {
  const auto ends = pr.chunk_ends();
  std::vector<long> scratch;
  const auto& prof = resolve_profile(lambda_profile, scratch, ends);
  const double floor_x = p_hat_floor_x(pr);
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const double x = double(ends[i] - prof[i]) / double(pr.n);
    if (x >= floor_x - kSlack) return ends[i];
  }
  throw std::runtime_error("no chunk end reaches the decoding threshold");
}

long stop_point(const std::vector<long>& lambda_profile, const ChannelParams& pr) {
  const auto ends = pr.chunk_ends();
  std::vector<long> scratch;
  const auto& prof = resolve_profile(lambda_profile, scratch, ends);
  const double cap_x = p_hat_top_x(pr) - pr.theta;
  long best = -1;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const double x = double(ends[i] - prof[i]) / double(pr.n);
    if (x <= cap_x + kSlack) best = ends[i];
  }
  if (best < 0) throw std::runtime_error("every chunk end lies beyond the stop threshold");
  return best;
}

ConditionCheck check_conditions(double t, double lambda_t,
                                const ChannelParams& pr, double rate) {
  ConditionCheck out;
  const double x = unerased_fraction(t, lambda_t, pr);
  const double tau = t / double(pr.n);
  const double ell = lambda_t / double(pr.n);
  const double top = 1.0 - 1.0 / pr.q;
  const double mc = margin_coeff(pr);

  double ref;
  try {
    ref = p_hat_t(t, lambda_t, pr);
  } catch (const std::domain_error&) {
    return out;  // not a usable iteration point
  }

  if (ref >= -kSlack && ref <= top + kSlack) {
    const double h = q_entropy(std::clamp(ref, 0.0, top), pr.q);
    out.list_ok = x * (1.0 - h) - pr.epsilon / 4.0 >= rate - kSlack;
  }
  const double qd = double(pr.q);
  const double lhs = pr.p - x * ref + (1.0 - tau) * mc;
  const double rhs = ((qd - 1.0) / (2.0 * qd)) * (1.0 - pr.p_star - tau + ell);
  out.energy_ok = lhs <= rhs + kSlack;
  return out;
}

double CorruptionTrajectory::p_at(std::size_t i) const {
  const auto& r = records.at(i);
  const long unerased = r.t - r.erasures;
  if (unerased <= 0) return 0.0;
  return double(r.errors) / double(unerased);
}

std::vector<long> CorruptionTrajectory::lambda_profile() const {
  std::vector<long> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.erasures);
  return out;
}

TstarResult classify_and_find_tstar(const CorruptionTrajectory& traj,
                                    const ChannelParams& pr) {
  const auto ends = pr.chunk_ends();
  if (traj.records.size() != ends.size())
    throw std::invalid_argument("trajectory must record every chunk end");
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const auto& r = traj.records[i];
    if (r.t != ends[i] || r.errors < 0 || r.erasures < 0 || r.errors + r.erasures > r.t)
      throw std::invalid_argument("trajectory records are inconsistent");
  }

  const auto prof = traj.lambda_profile();
  const long t0 = t_zero(prof, pr);
  const long stop = stop_point(prof, pr);
  std::size_t i0 = 0;
  while (ends[i0] != t0) ++i0;

  TstarResult out;
  const double ref0 = p_hat_t(double(t0), double(prof[i0]), pr);
  const double frac0 = traj.p_at(i0);
  if (frac0 < ref0) {
    out.type = TrajectoryType::Low;
    out.t_star = t0;
    return out;
  }
  out.type = TrajectoryType::High;
  if (frac0 == ref0) {  // sitting exactly on the curve decodes immediately
    out.t_star = t0;
    return out;
  }
  for (std::size_t i = i0 + 1; i < ends.size() && ends[i] <= stop; ++i) {
    const double x = double(ends[i] - prof[i]) / double(pr.n);
    if (x > p_hat_top_x(pr) + kSlack) break;
    const double ref = p_hat_t(double(ends[i]), double(prof[i]), pr);
    if (traj.p_at(i) <= ref) {
      out.t_star = ends[i];
      return out;
    }
  }
  throw std::logic_error("trajectory never crossed back under the reference before the stop point");
}

std::vector<RegionRow> region_curves(const ChannelParams& pr, double rate) {
  std::vector<RegionRow> rows;
  auto ts = pr.chunk_ends();
  ts.push_back(pr.n);
  const double n = double(pr.n);
  const long ecap = pr.error_cap();
  const double mc = margin_coeff(pr);
  const double qd = double(pr.q);
  const double floor_x = p_hat_floor_x(pr);
  const double top_x = p_hat_top_x(pr);

  for (long t : ts) {
    const double x = double(t) / n;  // zero-erasure sampling: t - lambda = t
    rows.push_back({"calvin_upper", double(t), double(t),
                    double(std::min(t, ecap)) / double(t)});
    rows.push_back({"calvin_lower", double(t), double(t),
                    double(std::max<long>(0, ecap - (pr.n - t))) / double(t)});

    const double hy = 1.0 - (rate + pr.epsilon / 4.0) / x;
    if (hy >= -kSlack)
      rows.push_back({"list_ceiling", double(t), double(t),
                      inverse_q_entropy(std::clamp(hy, 0.0, 1.0), pr.q)});

    const double floor_val =
        (pr.p + (1.0 - x) * mc - ((qd - 1.0) / (2.0 * qd)) * (1.0 - pr.p_star - x)) / x;
    rows.push_back({"energy_floor", double(t), double(t), std::max(0.0, floor_val)});

    if (x >= floor_x - kSlack && x <= top_x + kSlack && x > 0.0)
      rows.push_back({"p_hat", double(t), double(t), p_hat_t(double(t), 0.0, pr)});
  }
  return rows;
}

}  // namespace jamlab
