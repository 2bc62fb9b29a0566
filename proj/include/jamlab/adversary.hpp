#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "jamlab/codec.hpp"
#include "jamlab/rng.hpp"

namespace jamlab {

struct AdversaryBudget {
  long error_cap = 0;
  long erasure_cap = 0;
  long errors_used = 0;
  long erasures_used = 0;

  bool can_err() const { return errors_used < error_cap; }
  bool can_erase() const { return erasures_used < erasure_cap; }
};

struct AdversaryAction {
  enum Kind : std::uint8_t { Pass = 0, Erase = 1, Substitute = 2 };
  Kind kind = Pass;
  Symbol symbol = 0;  // replacement value when kind == Substitute

  static AdversaryAction pass() { return {}; }
  static AdversaryAction erase() { return {Erase, 0}; }
  static AdversaryAction substitute(Symbol value) { return {Substitute, value}; }
};

/**
 * What an adversary sees when deciding position i (0-based): the sent word up
 * to its causal horizon, its own past outputs, and the budget ledger.  The
 * horizon is min(n, i + 1 + lookahead) symbols, so lookahead 0 is the strictly
 * causal channel.  message is the transmitted index when the adversary is
 * configured to see it, otherwise -1.
 */
struct StepContext {
  long position = 0;
  long n = 0;
  int q = 2;
  std::span<const Symbol> x_visible;
  std::span<const std::uint16_t> y_prefix;
  const AdversaryBudget* budget = nullptr;
  long message = -1;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual AdversaryAction step(const StepContext& ctx) = 0;
  virtual const char* kind() const = 0;
};

struct ChannelRun {
  ReceivedWord y;
  std::vector<AdversaryAction> actions;
  AdversaryBudget budget;
  long violations = 0;  // actions clamped to Pass by the framework
};

/**
 * Drives one word through the channel.  x_at(i) is called once per position
 * in increasing order (this is what keeps transmitter secrets causal); the
 * framework materializes symbols up to the adversary's horizon, enforces the
 * budget and the no-op-substitution rule by clamping illegal actions to Pass,
 * and counts each clamp as a violation.
 */
ChannelRun run_channel(long n, int q, const std::function<Symbol(long)>& x_at,
                       Adversary& adversary, AdversaryBudget caps,
                       long lookahead = 0, long message = -1);

/**
 * The babble-and-push attack.
 *
 * Babble phase: corrupt a precommitted uniform floor(n*pbar)-subset of the
 * first b = floor(n*(alpha_q(pbar) + epsilon/2)) positions with uniform
 * non-identity symbols.  At position b the attacker picks a codeword pair
 * (message, secrets) uniformly among those whose length-b prefix sits at
 * Hamming distance exactly floor(n*pbar) from its own output so far; when no
 * pair achieves that distance exactly it falls back to the pairs minimizing
 * the deviation from it (fallback_engaged records this).  Push phase: on each
 * later position that disagrees with the chosen codeword, substitute toward
 * it with probability 1/2 while error budget remains, then erase
 * disagreements while erasure budget remains, then pass.
 */
struct BabblePushState {
  double pbar = 0.0;
  long b = 0;
  long babble_size = 0;
  std::vector<long> gamma;       // positions to corrupt, ascending
  bool push_ready = false;
  long chosen_message = -1;
  std::vector<long> chosen_secrets;
  std::vector<Symbol> target;    // the codeword being pushed toward
  bool fallback_engaged = false;
  long push_offers = 0;          // disagreements seen while error budget open
  long push_substitutions = 0;   // coin said substitute
};

class BabblePushAdversary : public Adversary {
 public:
  BabblePushAdversary(const Codebook& cb, double pbar, Stream babble,
                      Stream coins, bool allow_clamp_b = false);
  AdversaryAction step(const StepContext& ctx) override;
  const char* kind() const override { return "babble_push"; }
  const BabblePushState& state() const { return state_; }

 private:
  void prepare_push(const StepContext& ctx);

  const Codebook* cb_;
  Stream babble_;
  Stream coins_;
  BabblePushState state_;
  std::size_t gamma_next_ = 0;
  std::vector<std::uint16_t> y_self_;  // own outputs over [0, b)
};

std::unique_ptr<BabblePushAdversary> make_babble_push(const Codebook& cb,
                                                      double pbar,
                                                      Stream babble, Stream coins,
                                                      bool allow_clamp_b = false);

/**
 * Reference adversaries for calibration:
 *   null            never acts,
 *   uniform_random  spends both budgets at precommitted uniform positions
 *                   (disjoint), substituting uniform non-identity symbols,
 *   greedy_push     packs errors then erasures into the latest positions,
 *   front_loaded    spends the whole error budget on the earliest positions.
 */
enum class BaselineKind { Null, UniformRandom, GreedyPush, FrontLoaded };

std::unique_ptr<Adversary> make_baseline(BaselineKind kind, long n, int q,
                                         AdversaryBudget caps, Stream placement,
                                         Stream coins);

}  // namespace jamlab
