#include "jamlab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>
#include <vector>

#include "jamlab/qmath.hpp"

namespace jamlab {

namespace {

void require_budgets(const ChannelParams& pr) {
  if (pr.q < 2) throw std::invalid_argument("alphabet size must be at least 2");
  if (pr.p < 0.0 || pr.p > 1.0 || pr.p_star < 0.0 || pr.p_star > 1.0)
    throw std::invalid_argument("budget fractions must lie in [0, 1]");
}

double eval_or_inf(double pbar, const ChannelParams& pr) {
  auto v = rate_term(pbar, pr);
  return v ? *v : std::numeric_limits<double>::infinity();
}

struct GridBest {
  double value = std::numeric_limits<double>::infinity();
  double arg = 0.0;
};

GridBest scan_range(const ChannelParams& pr, long lo, long hi, long points) {
  GridBest best;
  const double step = points > 1 ? pr.p / double(points - 1) : 0.0;
  for (long i = lo; i < hi; ++i) {
    const double pbar = std::min(pr.p, double(i) * step);
    const double v = eval_or_inf(pbar, pr);
    if (v < best.value) {
      best.value = v;
      best.arg = pbar;
    }
  }
  return best;
}

}  // namespace

double alpha_q(double pbar, const ChannelParams& pr) {
  const double qd = double(pr.q);
  return 1.0 - (2.0 * qd / (qd - 1.0)) * (pr.p - pbar) - (qd / (qd - 1.0)) * pr.p_star;
}

std::optional<double> rate_term(double pbar, const ChannelParams& pr) {
  require_budgets(pr);
  if (pbar < -kSlack || pbar > pr.p + kSlack)
    throw std::invalid_argument("pbar must lie in [0, p]");
  pbar = std::clamp(pbar, 0.0, pr.p);
  const double a = alpha_q(pbar, pr);
  if (a <= 0.0) return std::nullopt;
  const double top = 1.0 - 1.0 / pr.q;
  const double arg = pbar / a;
  if (arg > top + kSlack) return std::nullopt;
  return a * (1.0 - q_entropy(std::min(arg, top), pr.q));
}

CapacityResult capacity(const ChannelParams& pr) {
  require_budgets(pr);
  const double edge = (double(pr.q) - 1.0) / double(pr.q);

  CapacityResult out;
  out.zero_region = pr.p > edge / 2.0 + kSlack || pr.p_star > edge + kSlack ||
                    pr.p + pr.p_star > edge + kSlack;
  if (out.zero_region) return out;

  // Inside the region the minimum is exactly zero iff some feasible pbar
  // drives the entropy argument to 1 - 1/q, which happens at
  // pbar0 = 2p + pstar - (q-1)/q.
  const double pbar0 = 2.0 * pr.p + pr.p_star - edge;
  if (pbar0 >= -kSlack) {
    out.value = 0.0;
    out.argmin_pbar = std::clamp(pbar0, 0.0, pr.p);
    return out;
  }

  if (pr.p <= 0.0) {
    out.value = eval_or_inf(0.0, pr);
    out.argmin_pbar = 0.0;
    return out;
  }

  // Coarse bracket scan, then golden-section refinement.
  const long points = 1024;
  GridBest best = scan_range(pr, 0, points, points);
  const double step = pr.p / double(points - 1);
  double a = std::max(0.0, best.arg - step);
  double b = std::min(pr.p, best.arg + step);

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = eval_or_inf(x1, pr);
  double f2 = eval_or_inf(x2, pr);
  while (b - a > 1e-10) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = eval_or_inf(x1, pr);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = eval_or_inf(x2, pr);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fmid = eval_or_inf(mid, pr);
  out.value = best.value;
  out.argmin_pbar = best.arg;
  if (fmid < out.value) {
    out.value = fmid;
    out.argmin_pbar = mid;
  }
  if (out.value < 0.0 && out.value > -1e-9) out.value = 0.0;  // numeric dust
  return out;
}

CapacityResult capacity_grid_oracle(const ChannelParams& pr, long grid_points) {
  require_budgets(pr);
  CapacityResult quick = capacity(pr);
  if (quick.zero_region) return quick;
  if (grid_points < 2 || pr.p <= 0.0) {
    quick.value = eval_or_inf(0.0, pr);
    quick.argmin_pbar = 0.0;
    quick.value = std::max(quick.value, 0.0);
    return quick;
  }

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const long workers = std::min<long>(hw, 8);
  std::vector<std::future<GridBest>> futures;
  const long per = (grid_points + workers - 1) / workers;
  for (long w = 0; w < workers; ++w) {
    const long lo = w * per;
    const long hi = std::min(grid_points, lo + per);
    if (lo >= hi) break;
    futures.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                 [&pr, lo, hi, grid_points] {
                                   return scan_range(pr, lo, hi, grid_points);
                                 }));
  }
  GridBest best;
  for (auto& f : futures) {
    GridBest g = f.get();
    if (g.value < best.value) best = g;
  }
  CapacityResult out;
  out.zero_region = false;
  out.value = std::max(best.value, 0.0);
  out.argmin_pbar = best.arg;
  return out;
}

double special_case_capacity(SpecialCase kind, const ChannelParams& pr) {
  require_budgets(pr);
  switch (kind) {
    case SpecialCase::ErasureOnly:
      return std::max(0.0, 1.0 - double(pr.q) / (double(pr.q) - 1.0) * pr.p_star);
    case SpecialCase::ErrorOnly: {
      ChannelParams copy = pr;
      copy.p_star = 0.0;
      return capacity(copy).value;
    }
    case SpecialCase::LargeQ:
      return 1.0 - 2.0 * pr.p - pr.p_star;
  }
  throw std::invalid_argument("unknown special case");
}

}  // namespace jamlab
