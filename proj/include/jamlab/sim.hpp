#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "jamlab/adversary.hpp"
#include "jamlab/codec.hpp"

namespace jamlab {

enum class AdversaryChoice { Null, UniformRandom, GreedyPush, FrontLoaded, BabblePush };

const char* adversary_name(AdversaryChoice kind);
AdversaryChoice adversary_from_name(const std::string& name);

struct AdversarySpec {
  AdversaryChoice kind = AdversaryChoice::Null;
  double pbar = 0.0;         // babble_push only
  long lookahead = 0;
  bool sees_message = false;
  bool allow_clamp_b = false;
};

struct TrialConfig {
  ChannelParams params;
  AdversarySpec adversary;
  std::uint64_t master_seed = 1;
  long trials = 1;
  bool fixed_message = false;
  long message = 0;          // used when fixed_message
  bool keep_transcripts = false;
};

/**
 * Everything one trial produced.  Deterministic given (config, trial index):
 * the codebook stream is keyed by trial 0, all per-trial streams by the trial
 * index, so re-running any single trial reproduces its transcript byte for
 * byte.
 */
struct Transcript {
  long trial = 0;
  long message = -1;
  std::vector<long> secrets;
  std::vector<Symbol> x;
  ReceivedWord y;
  std::vector<AdversaryAction> actions;
  DecodeOutcome outcome;
  AdversaryBudget budget;
  long violations = 0;
  bool fallback_engaged = false;
  long push_offers = 0;
  long push_substitutions = 0;

  bool success() const {
    return outcome.kind == DecodeKind::Decoded && outcome.message == message;
  }
};

nlohmann::json transcript_to_json(const Transcript& tr);

struct ExperimentSummary {
  long trials = 0;
  long decoded_correct = 0;
  long decoded_wrong = 0;
  long ambiguous = 0;
  long exhausted = 0;
  long violations = 0;
  long fallback_engaged = 0;
  long push_offers = 0;
  long push_substitutions = 0;
  long list_bound_violations = 0;  // observed list sizes above the analytic cap
  long errors_used_max = 0;
  long erasures_used_max = 0;
  double errors_used_mean = 0.0;
  double erasures_used_mean = 0.0;
  std::map<long, long> list_size_histogram;
  std::map<long, long> t_star_histogram;  // chunk end of successful decodes

  long failures() const { return trials - decoded_correct; }
};

nlohmann::json summary_to_json(const ExperimentSummary& summary,
                               const TrialConfig& config);

Transcript run_trial(const Codebook& cb, const TrialConfig& config, long trial);

/**
 * Runs all trials and merges their summaries in trial order.  workers > 1
 * splits the trial range across threads; results are identical for any worker
 * count because trials share nothing but the read-only codebook.  on_transcript,
 * when set, receives every transcript (called from the merge, in trial order).
 */
ExperimentSummary run_experiment(const Codebook& cb, const TrialConfig& config,
                                 int workers = 1,
                                 const std::function<void(const Transcript&)>& on_transcript = {});

// Codebook an experiment uses: seeded by the master seed, trial-independent.
Codebook experiment_codebook(const TrialConfig& config,
                             std::size_t max_bytes = std::size_t(1) << 28);

struct ErrorRate {
  double rate = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
};

// 95% Wilson score interval for failures/trials.  Throws on zero trials.
ErrorRate summarize_error_rate(long failures, long trials);
inline ErrorRate summarize_error_rate(const ExperimentSummary& s) {
  return summarize_error_rate(s.failures(), s.trials);
}

}  // namespace jamlab
