#include "jamlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "jamlab/capacity.hpp"
#include "jamlab/qmath.hpp"
#include "jamlab/rng.hpp"
#include "jamlab/trajectory.hpp"

namespace jamlab {

namespace {

constexpr std::size_t kMaxCounterexamples = 5;

ClaimResult named(const char* name) {
  ClaimResult c;
  c.name = name;
  return c;
}

struct Claims {
  ClaimResult entropy_shift = named("entropy_shift");
  ClaimResult list_energy = named("list_energy");
  ClaimResult above_at_stop = named("above_at_stop");
  ClaimResult in_gap = named("in_gap");
  ClaimResult suffix_fraction = named("suffix_fraction");
  ClaimResult zero_start = named("zero_start");
};

void record_violation(ClaimResult& claim, const std::string& text) {
  ++claim.violations;
  if (claim.counterexamples.size() < kMaxCounterexamples)
    claim.counterexamples.push_back(text);
}

std::string point_label(const ChannelParams& pr) {
  std::ostringstream os;
  os << std::setprecision(17) << "q=" << pr.q << " p=" << pr.p
     << " p_star=" << pr.p_star << " eps=" << pr.epsilon << " n=" << pr.n;
  if (pr.margin_scale != 1.0) os << " margin_scale=" << pr.margin_scale;
  return os.str();
}

double margin_coeff(const ChannelParams& pr) {
  return pr.margin_scale * pr.epsilon * pr.epsilon / (9.0 * pr.q * pr.q);
}

void check_entropy_shift(int q, ClaimResult& claim) {
  ++claim.draws;
  const double top = 1.0 - 1.0 / q;
  static const double kFractions[] = {0.0,  1e-9, 1e-6, 1e-4, 1e-3,
                                      0.01, 0.05, 0.1,  0.2,  0.3,
                                      0.5,  0.7,  0.9,  0.99, 0.999};
  static const double kDeltas[] = {1e-10, 1e-8, 1e-6, 1e-4, 1e-3, 0.01, 0.03,
                                   0.1,   0.2,  0.3,  0.4,  0.45, 0.49, 0.499};
  for (double frac : kFractions) {
    for (double delta : kDeltas) {
      const double x = frac * top;
      if (x + delta > top) {
        ++claim.skipped;
        continue;
      }
      ++claim.checks;
      const EntropyShiftBound b = entropy_shift_bound(x, delta, q);
      if (!(b.shifted < b.bound + kSlack)) {
        std::ostringstream os;
        os << std::setprecision(17) << "q=" << q << " x=" << x
           << " delta=" << delta << " shifted=" << b.shifted
           << " bound=" << b.bound;
        record_violation(claim, os.str());
      }
    }
  }
}

/**
 * Random parameter point: epsilon in [0.1, 0.45], erasure budget sometimes
 * zero, and 2p + p_star + epsilon kept strictly inside (q-1)/q so the point
 * sits well inside the positive-capacity region (the regime the swept
 * inequalities are claimed for).  Chunking uses ceil(1/theta) chunks of a
 * small random length, so the chunk fraction is at most epsilon^2/(9 q^2).
 */
ChannelParams draw_point(int q, Stream& rng, const VerifyOptions& opt) {
  ChannelParams pr;
  pr.q = q;
  const double edge = double(q - 1) / q;
  for (;;) {
    pr.epsilon = 0.1 + 0.35 * rng.next_double();
    pr.p_star = (rng.next_double() < 0.25) ? 0.0 : rng.next_double() * edge;
    const double pmax = (edge - 1e-6 - pr.epsilon - pr.p_star) / 2.0;
    if (pmax <= 1e-4) continue;
    pr.p = 1e-4 + rng.next_double() * (pmax - 1e-4);
    break;
  }
  const double theta_cap = pr.epsilon * pr.epsilon / (9.0 * q * q);
  const long chunks = static_cast<long>(std::ceil(1.0 / theta_cap - 1e-9));
  const long chunk_len = 2L << rng.below(3);  // 2, 4 or 8 symbols
  pr.n = chunks * chunk_len;
  pr.theta = 1.0 / double(chunks);
  pr.margin_scale = opt.margin_scale;
  return pr;
}

// Integer corruption placements exercising different shapes: spread out,
// crowded early, crowded late, and fully packed at either end.
CorruptionTrajectory make_trajectory(const ChannelParams& pr, int placement,
                                     Stream& rng) {
  const long n = pr.n;
  const long errors = pr.error_cap();
  const long erasures = pr.erasure_cap();
  std::vector<std::uint8_t> mark(static_cast<std::size_t>(n), 0);
  auto scatter = [&](long lo, long span) {
    const std::vector<long> pos =
        rng.sample_subset(span, errors + erasures);
    for (long i = 0; i < errors + erasures; ++i)
      mark[static_cast<std::size_t>(lo + pos[static_cast<std::size_t>(i)])] =
          (i < errors) ? 1 : 2;
  };
  const long crowd = std::min(
      n, std::max(errors + erasures, static_cast<long>(std::llround(0.4 * n))));
  switch (placement) {
    case 0: scatter(0, n); break;
    case 1: scatter(0, crowd); break;
    case 2: scatter(n - crowd, crowd); break;
    case 3:
      for (long i = 0; i < errors; ++i) mark[static_cast<std::size_t>(i)] = 1;
      for (long i = 0; i < erasures; ++i)
        mark[static_cast<std::size_t>(errors + i)] = 2;
      break;
    default:
      for (long i = 0; i < erasures; ++i)
        mark[static_cast<std::size_t>(n - errors - erasures + i)] = 2;
      for (long i = 0; i < errors; ++i)
        mark[static_cast<std::size_t>(n - errors + i)] = 1;
      break;
  }

  CorruptionTrajectory traj;
  const long c = pr.chunk_length();
  long e = 0;
  long l = 0;
  long idx = 0;
  for (long t = c; t <= n - c; t += c) {
    for (; idx < t; ++idx) {
      if (mark[static_cast<std::size_t>(idx)] == 1) ++e;
      if (mark[static_cast<std::size_t>(idx)] == 2) ++l;
    }
    traj.records.push_back(ChunkRecord{t, e, l});
  }
  return traj;
}

void run_point(const ChannelParams& pr, Stream& rng, Claims& cl) {
  const std::string label = point_label(pr);
  const double n = double(pr.n);
  const double floor_x = p_hat_floor_x(pr);
  const double top_x = p_hat_top_x(pr);
  const double mc = margin_coeff(pr);
  const double rate = capacity(pr).value - pr.epsilon;

  // Both decoder inequalities at every usable chunk end plus the exact domain
  // endpoints.  Zero erasures is the worst case: the energy gap only widens
  // with erasures at fixed unerased fraction, and the list side depends on the
  // unerased fraction alone.
  ++cl.list_energy.draws;
  auto check_both = [&](double t) {
    ++cl.list_energy.checks;
    const ConditionCheck cc = check_conditions(t, 0.0, pr, rate);
    if (!cc.list_ok || !cc.energy_ok) {
      std::ostringstream os;
      os << label << " t=" << std::setprecision(17) << t << " rate=" << rate
         << (cc.list_ok ? "" : " list_failed")
         << (cc.energy_ok ? "" : " energy_failed");
      record_violation(cl.list_energy, os.str());
    }
  };
  for (long t : pr.chunk_ends()) {
    const double x = double(t) / n;
    if (x >= floor_x && x <= top_x) check_both(double(t));
  }
  check_both(n * floor_x);
  check_both(n * top_x);

  // The reference curve absorbs the full error budget by the stop point.  Any
  // legal chunking stops within two chunk-cap fractions of the domain top, and
  // x * p_hat(x) grows with x, so these two points cover every stop position.
  ++cl.above_at_stop.draws;
  const double theta_cap = pr.epsilon * pr.epsilon / (9.0 * pr.q * pr.q);
  for (double x : {top_x - theta_cap, top_x - 2.0 * theta_cap}) {
    try {
      const double ph = p_hat_t(n * x, 0.0, pr);
      ++cl.above_at_stop.checks;
      if (!(x * ph >= pr.p - kSlack)) {
        std::ostringstream os;
        os << label << std::setprecision(17) << " x=" << x
           << " x*p_hat=" << x * ph;
        record_violation(cl.above_at_stop, os.str());
      }
    } catch (const std::domain_error&) {
      ++cl.above_at_stop.skipped;
    }
  }

  for (int placement = 0; placement < 5; ++placement) {
    const CorruptionTrajectory traj = make_trajectory(pr, placement, rng);
    const auto& rec = traj.records;
    ++cl.in_gap.draws;
    ++cl.suffix_fraction.draws;
    ++cl.zero_start.draws;

    for (std::size_t j = 0; j < rec.size(); ++j) {
      const double t = double(rec[j].t);
      const double lam = double(rec[j].erasures);
      const double x = (t - lam) / n;

      // Above the reference at one chunk end => above the lower envelope at
      // the next.
      if (j > 0) {
        const double tp = double(rec[j - 1].t);
        const double lp = double(rec[j - 1].erasures);
        const double xp = (tp - lp) / n;
        if (xp >= floor_x && x <= top_x &&
            traj.p_at(j - 1) > p_hat_t(tp, lp, pr)) {
          ++cl.in_gap.checks;
          const double lower = p_tilde_t(t, lam, pr);
          if (!(traj.p_at(j) > lower - kSlack)) {
            std::ostringstream os;
            os << label << std::setprecision(17) << " t=" << t
               << " lambda=" << lam << " p_t=" << traj.p_at(j)
               << " lower=" << lower;
            record_violation(cl.in_gap, os.str());
          }
        }
      }

      // Above the lower envelope => too few errors left to corrupt the
      // unerased suffix up to the consistency threshold.
      if (x >= floor_x && x <= top_x && traj.p_at(j) > p_tilde_t(t, lam, pr)) {
        const double denom = n - n * pr.p_star - t + lam;
        if (denom <= 0.0) {
          ++cl.suffix_fraction.skipped;
        } else {
          ++cl.suffix_fraction.checks;
          const double remaining = double(pr.error_cap() - rec[j].errors);
          const double fraction = remaining / denom;
          const double threshold = double(pr.q - 1) / (2.0 * pr.q) - mc -
                                   n * pr.p_star / (2.0 * pr.q * denom);
          if (!(fraction < threshold + kSlack)) {
            std::ostringstream os;
            os << label << std::setprecision(17) << " t=" << t
               << " lambda=" << lam << " fraction=" << fraction
               << " threshold=" << threshold;
            record_violation(cl.suffix_fraction, os.str());
          }
        }
      }
    }

    // At or under the reference where decoding starts => the energy
    // inequality holds there.
    long t0 = 0;
    try {
      t0 = t_zero(traj.lambda_profile(), pr);
    } catch (const std::runtime_error&) {
      ++cl.zero_start.skipped;
      continue;
    }
    const std::size_t j0 =
        static_cast<std::size_t>(t0 / pr.chunk_length() - 1);
    const double lam0 = double(rec[j0].erasures);
    if (traj.p_at(j0) <= p_hat_t(double(t0), lam0, pr)) {
      ++cl.zero_start.checks;
      if (!check_conditions(double(t0), lam0, pr, rate).energy_ok) {
        std::ostringstream os;
        os << label << " t0=" << t0 << " lambda=" << lam0;
        record_violation(cl.zero_start, os.str());
      }
    }
  }
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& options) {
  Claims cl;
  VerifyReport report;

  if (options.single_point) {
    ChannelParams pr = options.point;
    pr.margin_scale = options.margin_scale;
    const std::vector<std::string> errors = pr.validate(true, true);
    if (!errors.empty()) {
      std::string joined = "invalid point:";
      for (const auto& e : errors) joined += " " + e + ";";
      throw std::invalid_argument(joined);
    }
    check_entropy_shift(pr.q, cl.entropy_shift);
    Stream rng(options.seed, 0, Role::Codebook);
    run_point(pr, rng, cl);
    report.total_draws = 1;
  } else {
    for (int q : options.qs) check_entropy_shift(q, cl.entropy_shift);
    for (int q : options.qs) {
      for (long i = 0; i < options.draws_per_q; ++i) {
        const std::uint64_t slot =
            (static_cast<std::uint64_t>(q) << 40) + static_cast<std::uint64_t>(i);
        Stream rng(options.seed, slot, Role::Codebook);
        const ChannelParams pr = draw_point(q, rng, options);
        run_point(pr, rng, cl);
      }
    }
    report.total_draws =
        static_cast<long>(options.qs.size()) * options.draws_per_q;
  }

  report.claims = {cl.entropy_shift, cl.list_energy,   cl.above_at_stop,
                   cl.in_gap,        cl.suffix_fraction, cl.zero_start};
  return report;
}

}  // namespace jamlab
