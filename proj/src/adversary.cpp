#include "jamlab/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jamlab/capacity.hpp"
#include "jamlab/qmath.hpp"

namespace jamlab {

namespace {

constexpr double kIntSlack = 1e-9;

Symbol non_identity_symbol(Stream& stream, int q, Symbol current) {
  const auto v = static_cast<Symbol>(stream.below(static_cast<std::uint64_t>(q - 1)));
  return v >= current ? static_cast<Symbol>(v + 1) : v;
}

// Uniform draw from [0, bound) for arbitrary-precision bounds.
BigInt big_below(Stream& stream, const BigInt& bound) {
  if (bound <= 1) return 0;
  if (bound <= BigInt(std::uint64_t(1) << 62))
    return BigInt(stream.below(bound.convert_to<std::uint64_t>()));
  const std::size_t bits = boost::multiprecision::msb(bound) + 1;
  const std::size_t words = (bits + 63) / 64;
  for (;;) {
    BigInt r = 0;
    for (std::size_t w = 0; w < words; ++w) {
      r <<= 64;
      r |= BigInt(stream.next_u64());
    }
    r >>= words * 64 - bits;
    if (r < bound) return r;
  }
}

class NullAdversary final : public Adversary {
 public:
  AdversaryAction step(const StepContext&) override { return AdversaryAction::pass(); }
  const char* kind() const override { return "null"; }
};

// Budgets spent at precommitted uniform positions, errors and erasures
// disjoint; substituted values drawn on arrival so the choice stays causal.
class UniformRandomAdversary final : public Adversary {
 public:
  UniformRandomAdversary(long n, AdversaryBudget caps, Stream placement, Stream coins)
      : coins_(coins), mark_(static_cast<std::size_t>(n), 0) {
    Stream place = placement;
    auto chosen = place.sample_subset(n, caps.error_cap + caps.erasure_cap);
    for (long i = 0; i < static_cast<long>(chosen.size()); ++i)
      mark_[static_cast<std::size_t>(chosen[static_cast<std::size_t>(i)])] =
          i < caps.error_cap ? 1 : 2;
  }

  AdversaryAction step(const StepContext& ctx) override {
    switch (mark_[static_cast<std::size_t>(ctx.position)]) {
      case 1:
        return AdversaryAction::substitute(non_identity_symbol(
            coins_, ctx.q, ctx.x_visible[static_cast<std::size_t>(ctx.position)]));
      case 2:
        return AdversaryAction::erase();
      default:
        return AdversaryAction::pass();
    }
  }
  const char* kind() const override { return "uniform_random"; }

 private:
  Stream coins_;
  std::vector<char> mark_;
};

// Errors then erasures packed into the latest positions.
class GreedyPushAdversary final : public Adversary {
 public:
  GreedyPushAdversary(long n, AdversaryBudget caps, Stream coins)
      : coins_(coins),
        error_from_(n - caps.erasure_cap - caps.error_cap),
        erase_from_(n - caps.erasure_cap) {}

  AdversaryAction step(const StepContext& ctx) override {
    if (ctx.position >= erase_from_) return AdversaryAction::erase();
    if (ctx.position >= error_from_)
      return AdversaryAction::substitute(non_identity_symbol(
          coins_, ctx.q, ctx.x_visible[static_cast<std::size_t>(ctx.position)]));
    return AdversaryAction::pass();
  }
  const char* kind() const override { return "greedy_push"; }

 private:
  Stream coins_;
  long error_from_;
  long erase_from_;
};

// The whole error budget on the earliest positions; erasures unspent.
class FrontLoadedAdversary final : public Adversary {
 public:
  FrontLoadedAdversary(AdversaryBudget caps, Stream coins)
      : coins_(coins), error_until_(caps.error_cap) {}

  AdversaryAction step(const StepContext& ctx) override {
    if (ctx.position < error_until_)
      return AdversaryAction::substitute(non_identity_symbol(
          coins_, ctx.q, ctx.x_visible[static_cast<std::size_t>(ctx.position)]));
    return AdversaryAction::pass();
  }
  const char* kind() const override { return "front_loaded"; }

 private:
  Stream coins_;
  long error_until_;
};

}  // namespace

ChannelRun run_channel(long n, int q, const std::function<Symbol(long)>& x_at,
                       Adversary& adversary, AdversaryBudget caps,
                       long lookahead, long message) {
  if (n < 1 || q < 2) throw std::invalid_argument("need n >= 1 and q >= 2");
  ChannelRun run;
  run.budget = caps;
  run.y.q = q;
  run.y.symbols.reserve(static_cast<std::size_t>(n));
  run.actions.reserve(static_cast<std::size_t>(n));

  std::vector<Symbol> x;
  x.reserve(static_cast<std::size_t>(n));
  auto ensure = [&](long upto) {
    while (static_cast<long>(x.size()) < upto)
      x.push_back(x_at(static_cast<long>(x.size())));
  };

  for (long i = 0; i < n; ++i) {
    const long horizon = std::min(n, i + 1 + lookahead);
    ensure(horizon);

    StepContext ctx;
    ctx.position = i;
    ctx.n = n;
    ctx.q = q;
    ctx.x_visible = std::span<const Symbol>(x.data(), static_cast<std::size_t>(horizon));
    ctx.y_prefix = std::span<const std::uint16_t>(run.y.symbols.data(),
                                                  static_cast<std::size_t>(i));
    ctx.budget = &run.budget;
    ctx.message = message;

    AdversaryAction act = adversary.step(ctx);
    bool legal = true;
    switch (act.kind) {
      case AdversaryAction::Substitute:
        legal = run.budget.can_err() && act.symbol < q && act.symbol != x[static_cast<std::size_t>(i)];
        break;
      case AdversaryAction::Erase:
        legal = run.budget.can_erase();
        break;
      case AdversaryAction::Pass:
        break;
    }
    if (!legal) {
      ++run.violations;
      act = AdversaryAction::pass();
    }

    switch (act.kind) {
      case AdversaryAction::Substitute:
        ++run.budget.errors_used;
        run.y.symbols.push_back(act.symbol);
        break;
      case AdversaryAction::Erase:
        ++run.budget.erasures_used;
        run.y.symbols.push_back(static_cast<std::uint16_t>(q));
        break;
      case AdversaryAction::Pass:
        run.y.symbols.push_back(x[static_cast<std::size_t>(i)]);
        break;
    }
    run.actions.push_back(act);
  }
  return run;
}

BabblePushAdversary::BabblePushAdversary(const Codebook& cb, double pbar,
                                         Stream babble, Stream coins,
                                         bool allow_clamp_b)
    : cb_(&cb), babble_(babble), coins_(coins) {
  const ChannelParams& pr = cb.params;
  if (pbar < -kSlack || pbar > pr.p + kSlack)
    throw std::invalid_argument("pbar must lie in [0, p]");
  pbar = std::clamp(pbar, 0.0, pr.p);

  state_.pbar = pbar;
  state_.babble_size = static_cast<long>(std::floor(double(pr.n) * pbar + kIntSlack));
  const double b_raw = double(pr.n) * (alpha_q(pbar, pr) + pr.epsilon / 2.0);
  const long b_floor = static_cast<long>(std::floor(b_raw + kIntSlack));
  if (b_floor > pr.n && !allow_clamp_b)
    throw std::invalid_argument(
        "babble horizon n*(alpha + eps/2) exceeds the block; enable clamping to allow this");
  state_.b = std::min(b_floor, pr.n - 1);
  if (state_.b < state_.babble_size)
    throw std::invalid_argument("babble horizon too short for the babble weight");

  state_.gamma = babble_.sample_subset(state_.b, state_.babble_size);
  std::sort(state_.gamma.begin(), state_.gamma.end());
}

void BabblePushAdversary::prepare_push(const StepContext& ctx) {
  const Codebook& cb = *cb_;
  const long b = state_.b;
  const long c = cb.chunk_len;
  const long prefix_chunks = (b + c - 1) / c;
  const long target_d = state_.babble_size;

  // Per-chunk distances between each secret's block and the babbled output,
  // counted over the part of the chunk inside [0, b).  Refilled by forward()
  // for whichever message it walks, so it always matches the last walk.
  std::vector<std::vector<long>> dist(
      static_cast<std::size_t>(prefix_chunks),
      std::vector<long>(static_cast<std::size_t>(cb.secrets), 0));

  const long max_sum = b;
  // ways[m][d]: secret-prefix assignments of message m at total distance d.
  auto forward = [&](long m, std::vector<std::vector<BigInt>>* layers) {
    std::vector<BigInt> cur(static_cast<std::size_t>(max_sum + 1));
    cur[0] = 1;
    if (layers) layers->push_back(cur);
    for (long j = 0; j < prefix_chunks; ++j) {
      const long lo = j * c;
      const long len = std::min(c, b - lo);
      std::vector<BigInt> next(static_cast<std::size_t>(max_sum + 1));
      for (long s = 0; s < cb.secrets; ++s) {
        const long d = [&] {
          long dd = 0;
          const Symbol* block = cb.block(j, m, s);
          for (long i = 0; i < len; ++i)
            dd += ctx.y_prefix[static_cast<std::size_t>(lo + i)] != block[i];
          return dd;
        }();
        dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = d;
        for (long v = d; v <= max_sum; ++v)
          if (cur[static_cast<std::size_t>(v - d)] != 0)
            next[static_cast<std::size_t>(v)] += cur[static_cast<std::size_t>(v - d)];
      }
      cur.swap(next);
      if (layers) layers->push_back(cur);
    }
    return cur;
  };

  std::vector<std::vector<BigInt>> final_by_m(static_cast<std::size_t>(cb.messages));
  for (long m = 0; m < cb.messages; ++m)
    final_by_m[static_cast<std::size_t>(m)] = forward(m, nullptr);

  // Prefer pairs at the exact babble distance; otherwise widen symmetrically.
  long chosen_d = -1;
  BigInt total = 0;
  for (long dev = 0; dev <= max_sum && total == 0; ++dev) {
    for (long m = 0; m < cb.messages; ++m) {
      const auto& ways = final_by_m[static_cast<std::size_t>(m)];
      if (target_d - dev >= 0) total += ways[static_cast<std::size_t>(target_d - dev)];
      if (dev > 0 && target_d + dev <= max_sum)
        total += ways[static_cast<std::size_t>(target_d + dev)];
    }
    if (total != 0) {
      chosen_d = dev;
      state_.fallback_engaged = dev > 0;
    }
  }
  if (chosen_d < 0) throw std::logic_error("codeword prefix set is empty");

  // Uniform pick across every (message, achievable distance) pair in the set.
  BigInt r = big_below(babble_, total);
  long pick_m = -1, pick_d = -1;
  for (long m = 0; m < cb.messages && pick_m < 0; ++m) {
    const auto& ways = final_by_m[static_cast<std::size_t>(m)];
    long cands[2] = {target_d - chosen_d, target_d + chosen_d};
    const int ncand = chosen_d == 0 ? 1 : 2;
    for (int ci = 0; ci < ncand && pick_m < 0; ++ci) {
      const long d = cands[ci];
      if (d < 0 || d > max_sum) continue;
      const BigInt& w = ways[static_cast<std::size_t>(d)];
      if (r < w) {
        pick_m = m;
        pick_d = d;
      } else {
        r -= w;
      }
    }
  }

  // Backward-sample the secret prefix of the chosen message given its total.
  std::vector<std::vector<BigInt>> layers;
  forward(pick_m, &layers);
  std::vector<long> secrets(static_cast<std::size_t>(cb.chunks), 0);
  long rem = pick_d;
  for (long j = prefix_chunks - 1; j >= 0; --j) {
    BigInt w_total = 0;
    for (long s = 0; s < cb.secrets; ++s) {
      const long d = dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)];
      if (rem - d >= 0)
        w_total += layers[static_cast<std::size_t>(j)][static_cast<std::size_t>(rem - d)];
    }
    BigInt rr = big_below(babble_, w_total);
    for (long s = 0; s < cb.secrets; ++s) {
      const long d = dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)];
      if (rem - d < 0) continue;
      const BigInt& w = layers[static_cast<std::size_t>(j)][static_cast<std::size_t>(rem - d)];
      if (rr < w) {
        secrets[static_cast<std::size_t>(j)] = s;
        rem -= d;
        break;
      }
      rr -= w;
    }
  }
  for (long j = prefix_chunks; j < cb.chunks; ++j)
    secrets[static_cast<std::size_t>(j)] =
        static_cast<long>(babble_.below(static_cast<std::uint64_t>(cb.secrets)));

  state_.chosen_message = pick_m;
  state_.chosen_secrets = secrets;
  state_.target = encode(cb, pick_m, secrets);
  state_.push_ready = true;
}

AdversaryAction BabblePushAdversary::step(const StepContext& ctx) {
  const long i = ctx.position;
  if (i < state_.b) {
    if (gamma_next_ < state_.gamma.size() && state_.gamma[gamma_next_] == i) {
      ++gamma_next_;
      return AdversaryAction::substitute(non_identity_symbol(
          babble_, ctx.q, ctx.x_visible[static_cast<std::size_t>(i)]));
    }
    return AdversaryAction::pass();
  }

  if (!state_.push_ready) prepare_push(ctx);

  const Symbol want = state_.target[static_cast<std::size_t>(i)];
  if (ctx.x_visible[static_cast<std::size_t>(i)] == want) return AdversaryAction::pass();

  if (ctx.budget->can_err()) {
    ++state_.push_offers;
    if (coins_.coin()) {
      ++state_.push_substitutions;
      return AdversaryAction::substitute(want);
    }
    return AdversaryAction::pass();
  }
  if (ctx.budget->can_erase()) return AdversaryAction::erase();
  return AdversaryAction::pass();
}

std::unique_ptr<BabblePushAdversary> make_babble_push(const Codebook& cb,
                                                      double pbar, Stream babble,
                                                      Stream coins,
                                                      bool allow_clamp_b) {
  return std::make_unique<BabblePushAdversary>(cb, pbar, babble, coins, allow_clamp_b);
}

std::unique_ptr<Adversary> make_baseline(BaselineKind kind, long n, int q,
                                         AdversaryBudget caps, Stream placement,
                                         Stream coins) {
  (void)q;
  switch (kind) {
    case BaselineKind::Null:
      return std::make_unique<NullAdversary>();
    case BaselineKind::UniformRandom:
      return std::make_unique<UniformRandomAdversary>(n, caps, placement, coins);
    case BaselineKind::GreedyPush:
      return std::make_unique<GreedyPushAdversary>(n, caps, coins);
    case BaselineKind::FrontLoaded:
      return std::make_unique<FrontLoadedAdversary>(caps, coins);
  }
  throw std::invalid_argument("unknown baseline adversary");
}

}  // namespace jamlab
