#include "jamlab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace jamlab {

namespace {

std::string base64(const unsigned char* data, std::size_t len) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    unsigned v = data[i] << 16;
    if (i + 1 < len) v |= data[i + 1] << 8;
    if (i + 2 < len) v |= data[i + 2];
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(i + 1 < len ? alphabet[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? alphabet[v & 63] : '=');
  }
  return out;
}

std::string base64_symbols(const std::vector<Symbol>& v) {
  return base64(v.data(), v.size());
}

std::string base64_u16(const std::vector<std::uint16_t>& v) {
  std::vector<unsigned char> bytes;
  bytes.reserve(v.size() * 2);
  for (std::uint16_t s : v) {
    bytes.push_back(static_cast<unsigned char>(s & 0xFF));
    bytes.push_back(static_cast<unsigned char>(s >> 8));
  }
  return base64(bytes.data(), bytes.size());
}

const char* decode_kind_name(DecodeKind kind) {
  switch (kind) {
    case DecodeKind::Decoded: return "decoded";
    case DecodeKind::Ambiguous: return "ambiguous";
    case DecodeKind::Exhausted: return "exhausted";
  }
  return "unknown";
}

const char* consistency_name(ConsistencyKind kind) {
  switch (kind) {
    case ConsistencyKind::None: return "none";
    case ConsistencyKind::Unique: return "unique";
    case ConsistencyKind::Ambiguous: return "ambiguous";
  }
  return "unknown";
}

}  // namespace

const char* adversary_name(AdversaryChoice kind) {
  switch (kind) {
    case AdversaryChoice::Null: return "null";
    case AdversaryChoice::UniformRandom: return "uniform_random";
    case AdversaryChoice::GreedyPush: return "greedy_push";
    case AdversaryChoice::FrontLoaded: return "front_loaded";
    case AdversaryChoice::BabblePush: return "babble_push";
  }
  return "unknown";
}

AdversaryChoice adversary_from_name(const std::string& name) {
  if (name == "null") return AdversaryChoice::Null;
  if (name == "uniform_random") return AdversaryChoice::UniformRandom;
  if (name == "greedy_push") return AdversaryChoice::GreedyPush;
  if (name == "front_loaded") return AdversaryChoice::FrontLoaded;
  if (name == "babble_push") return AdversaryChoice::BabblePush;
  throw std::invalid_argument("unknown adversary kind: " + name);
}

Codebook experiment_codebook(const TrialConfig& config, std::size_t max_bytes) {
  return generate_codebook(config.params, config.master_seed, max_bytes);
}

Transcript run_trial(const Codebook& cb, const TrialConfig& config, long trial) {
  const ChannelParams& pr = cb.params;
  Stream secret_stream(config.master_seed, static_cast<std::uint64_t>(trial),
                       Role::AliceSecrets);
  Stream babble(config.master_seed, static_cast<std::uint64_t>(trial),
                Role::AdversaryBabble);
  Stream coins(config.master_seed, static_cast<std::uint64_t>(trial),
               Role::AdversaryCoins);
  Stream message_stream(config.master_seed, static_cast<std::uint64_t>(trial),
                        Role::Message);

  Transcript tr;
  tr.trial = trial;
  tr.message = config.fixed_message
                   ? config.message
                   : static_cast<long>(message_stream.below(
                         static_cast<std::uint64_t>(cb.messages)));
  if (tr.message < 0 || tr.message >= cb.messages)
    throw std::invalid_argument("configured message index out of range");

  AdversaryBudget caps;
  caps.error_cap = pr.error_cap();
  caps.erasure_cap = pr.erasure_cap();

  std::unique_ptr<Adversary> adv;
  BabblePushAdversary* bp = nullptr;
  switch (config.adversary.kind) {
    case AdversaryChoice::Null:
      adv = make_baseline(BaselineKind::Null, pr.n, pr.q, caps, babble, coins);
      break;
    case AdversaryChoice::UniformRandom:
      adv = make_baseline(BaselineKind::UniformRandom, pr.n, pr.q, caps, babble, coins);
      break;
    case AdversaryChoice::GreedyPush:
      adv = make_baseline(BaselineKind::GreedyPush, pr.n, pr.q, caps, babble, coins);
      break;
    case AdversaryChoice::FrontLoaded:
      adv = make_baseline(BaselineKind::FrontLoaded, pr.n, pr.q, caps, babble, coins);
      break;
    case AdversaryChoice::BabblePush: {
      auto owned = make_babble_push(cb, config.adversary.pbar, babble, coins,
                                    config.adversary.allow_clamp_b);
      bp = owned.get();
      adv = std::move(owned);
      break;
    }
  }

  // Chunk secrets are drawn the first time the channel touches a chunk, so an
  // adversary with lookahead L never forces secrets beyond its horizon.
  const long c = cb.chunk_len;
  tr.secrets.reserve(static_cast<std::size_t>(cb.chunks));
  auto x_at = [&](long i) {
    const long j = i / c;
    while (static_cast<long>(tr.secrets.size()) <= j)
      tr.secrets.push_back(static_cast<long>(
          secret_stream.below(static_cast<std::uint64_t>(cb.secrets))));
    return cb.symbol(j, tr.message, tr.secrets[static_cast<std::size_t>(j)], i % c);
  };

  ChannelRun run = run_channel(pr.n, pr.q, x_at, *adv, caps,
                               config.adversary.lookahead,
                               config.adversary.sees_message ? tr.message : -1);
  tr.x = encode(cb, tr.message, tr.secrets);
  tr.y = std::move(run.y);
  tr.actions = std::move(run.actions);
  tr.budget = run.budget;
  tr.violations = run.violations;
  if (bp != nullptr) {
    tr.fallback_engaged = bp->state().fallback_engaged;
    tr.push_offers = bp->state().push_offers;
    tr.push_substitutions = bp->state().push_substitutions;
  }
  tr.outcome = receiver_decode(cb, tr.y);
  return tr;
}

nlohmann::json transcript_to_json(const Transcript& tr) {
  nlohmann::json attempts = nlohmann::json::array();
  for (const auto& at : tr.outcome.trace) {
    nlohmann::json a{{"t", at.t},
                     {"lambda", at.lambda},
                     {"radius", at.radius},
                     {"list", at.list},
                     {"consistency", consistency_name(at.consistency)}};
    if (std::isfinite(at.list_bound)) a["list_bound"] = at.list_bound;
    attempts.push_back(std::move(a));
  }
  std::vector<Symbol> action_bytes;
  action_bytes.reserve(tr.actions.size());
  for (const auto& act : tr.actions)
    action_bytes.push_back(static_cast<Symbol>(act.kind));

  return nlohmann::json{
      {"version", 1},
      {"trial", tr.trial},
      {"message", tr.message},
      {"secrets", tr.secrets},
      {"x_b64", base64_symbols(tr.x)},
      {"y_u16le_b64", base64_u16(tr.y.symbols)},
      {"actions_b64", base64_symbols(action_bytes)},
      {"outcome",
       {{"kind", decode_kind_name(tr.outcome.kind)},
        {"message", tr.outcome.message},
        {"t_star", tr.outcome.t_star}}},
      {"attempts", attempts},
      {"budget",
       {{"errors_used", tr.budget.errors_used},
        {"erasures_used", tr.budget.erasures_used},
        {"error_cap", tr.budget.error_cap},
        {"erasure_cap", tr.budget.erasure_cap}}},
      {"violations", tr.violations},
      {"adversary",
       {{"fallback_engaged", tr.fallback_engaged},
        {"push_offers", tr.push_offers},
        {"push_substitutions", tr.push_substitutions}}}};
}

namespace {

void absorb(ExperimentSummary& s, const Transcript& tr) {
  ++s.trials;
  switch (tr.outcome.kind) {
    case DecodeKind::Decoded:
      if (tr.outcome.message == tr.message) {
        ++s.decoded_correct;
        ++s.t_star_histogram[tr.outcome.t_star];
      } else {
        ++s.decoded_wrong;
      }
      break;
    case DecodeKind::Ambiguous:
      ++s.ambiguous;
      break;
    case DecodeKind::Exhausted:
      ++s.exhausted;
      break;
  }
  s.violations += tr.violations;
  s.fallback_engaged += tr.fallback_engaged ? 1 : 0;
  s.push_offers += tr.push_offers;
  s.push_substitutions += tr.push_substitutions;
  s.errors_used_max = std::max(s.errors_used_max, tr.budget.errors_used);
  s.erasures_used_max = std::max(s.erasures_used_max, tr.budget.erasures_used);
  s.errors_used_mean += double(tr.budget.errors_used);
  s.erasures_used_mean += double(tr.budget.erasures_used);
  for (const auto& at : tr.outcome.trace) {
    ++s.list_size_histogram[static_cast<long>(at.list.size())];
    if (std::isfinite(at.list_bound) &&
        double(at.list.size()) > at.list_bound + 1e-9)
      ++s.list_bound_violations;
  }
}

}  // namespace

ExperimentSummary run_experiment(const Codebook& cb, const TrialConfig& config,
                                 int workers,
                                 const std::function<void(const Transcript&)>& on_transcript) {
  if (config.trials < 0) throw std::invalid_argument("trial count must be nonnegative");
  std::vector<Transcript> results(static_cast<std::size_t>(config.trials));

  if (workers <= 1 || config.trials < 2) {
    for (long i = 0; i < config.trials; ++i) results[static_cast<std::size_t>(i)] = run_trial(cb, config, i);
  } else {
    const int count = std::min<long>(workers, config.trials);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> thrown(static_cast<std::size_t>(count));
    const long per = (config.trials + count - 1) / count;
    for (int w = 0; w < count; ++w) {
      const long lo = w * per;
      const long hi = std::min(config.trials, lo + per);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi, w] {
        try {
          for (long i = lo; i < hi; ++i)
            results[static_cast<std::size_t>(i)] = run_trial(cb, config, i);
        } catch (...) {
          thrown[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : thrown)
      if (e) std::rethrow_exception(e);
  }

  ExperimentSummary summary;
  for (const auto& tr : results) {
    absorb(summary, tr);
    if (on_transcript) on_transcript(tr);
  }
  if (summary.trials > 0) {
    summary.errors_used_mean /= double(summary.trials);
    summary.erasures_used_mean /= double(summary.trials);
  }
  return summary;
}

nlohmann::json summary_to_json(const ExperimentSummary& s, const TrialConfig& config) {
  auto hist_json = [](const std::map<long, long>& h) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : h) out[std::to_string(k)] = v;
    return out;
  };

  const ChannelParams& pr = config.params;
  nlohmann::json j{
      {"version", 1},
      {"config",
       {{"q", pr.q},
        {"p", pr.p},
        {"pstar", pr.p_star},
        {"epsilon", pr.epsilon},
        {"n", pr.n},
        {"theta", pr.theta},
        {"rate", pr.rate},
        {"secrets", pr.secret_count},
        {"theoretical_mode", pr.theoretical_mode},
        {"seed", config.master_seed},
        {"trials", config.trials},
        {"message_policy", config.fixed_message ? "fixed" : "uniform"},
        {"adversary",
         {{"kind", adversary_name(config.adversary.kind)},
          {"pbar", config.adversary.pbar},
          {"lookahead", config.adversary.lookahead},
          {"sees_message", config.adversary.sees_message}}}}},
      {"trials", s.trials},
      {"decoded_correct", s.decoded_correct},
      {"decoded_wrong", s.decoded_wrong},
      {"ambiguous", s.ambiguous},
      {"exhausted", s.exhausted},
      {"violations", s.violations},
      {"fallback_engaged", s.fallback_engaged},
      {"push_coin", {{"offers", s.push_offers}, {"substitutions", s.push_substitutions}}},
      {"list_bound_violations", s.list_bound_violations},
      {"budget",
       {{"errors_used_mean", s.errors_used_mean},
        {"errors_used_max", s.errors_used_max},
        {"erasures_used_mean", s.erasures_used_mean},
        {"erasures_used_max", s.erasures_used_max}}},
      {"list_size_histogram", hist_json(s.list_size_histogram)},
      {"t_star_histogram", hist_json(s.t_star_histogram)}};
  if (s.trials > 0) {
    const ErrorRate er = summarize_error_rate(s);
    j["error_rate"] = {{"rate", er.rate},
                       {"wilson_low", er.wilson_low},
                       {"wilson_high", er.wilson_high}};
  }
  return j;
}

ErrorRate summarize_error_rate(long failures, long trials) {
  if (trials <= 0) throw std::invalid_argument("error rate needs at least one trial");
  if (failures < 0 || failures > trials)
    throw std::invalid_argument("failure count outside [0, trials]");
  const double z = 1.959963984540054;  // 95% two-sided normal quantile
  const double nd = double(trials);
  const double kd = double(failures);
  const double denom = nd + z * z;
  const double center = (kd + z * z / 2.0) / denom;
  const double half = z * std::sqrt(kd * (nd - kd) / nd + z * z / 4.0) / denom;
  ErrorRate out;
  out.rate = kd / nd;
  out.wilson_low = std::max(0.0, center - half);
  out.wilson_high = std::min(1.0, center + half);
  return out;
}

}  // namespace jamlab
