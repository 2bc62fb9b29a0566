// Command-line front end for the jamlab library: capacity evaluation, curve
// emitters, Monte Carlo experiments, the numerical claim suite, and codebook
// files.  Exit codes: 0 success, 1 a check or experiment reported failures,
// 2 usage or configuration problems.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "jamlab/capacity.hpp"
#include "jamlab/codec.hpp"
#include "jamlab/params.hpp"
#include "jamlab/sim.hpp"
#include "jamlab/trajectory.hpp"
#include "jamlab/verify.hpp"

#ifndef JAMLAB_GIT_DESCRIBE
#define JAMLAB_GIT_DESCRIBE "unknown"
#endif

namespace {

using nlohmann::json;

int report_errors(const std::vector<std::string>& errors) {
  for (const auto& e : errors) std::cerr << "error: " << e << "\n";
  return 2;
}

int fail(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

std::string provenance(const std::string& command, const jamlab::ChannelParams& pr) {
  std::ostringstream os;
  os << "# jamlab " << JAMLAB_GIT_DESCRIBE << " " << command << std::setprecision(17)
     << " q=" << pr.q << " p=" << pr.p << " pstar=" << pr.p_star
     << " eps=" << pr.epsilon;
  if (pr.n > 0) os << " n=" << pr.n << " theta=" << pr.theta;
  return os.str();
}

// Output sink for the CSV emitters: a file when -o is given, stdout otherwise.
struct Sink {
  std::ofstream file;
  std::ostream* out = &std::cout;

  bool open(const std::string& path) {
    if (path.empty()) return true;
    file.open(path);
    if (!file) return false;
    out = &file;
    return true;
  }
  std::ostream& stream() { return *out; }
};

struct ParamOptions {
  CLI::Option* q = nullptr;
  CLI::Option* p = nullptr;
  CLI::Option* pstar = nullptr;
  CLI::Option* eps = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* theta = nullptr;
  CLI::Option* rate = nullptr;
  CLI::Option* secrets = nullptr;
};

ParamOptions add_param_options(CLI::App* cmd, jamlab::ChannelParams& pr,
                               bool with_block) {
  ParamOptions o;
  o.q = cmd->add_option("-q,--alphabet", pr.q, "alphabet size")->capture_default_str();
  o.p = cmd->add_option("-p,--error-budget", pr.p, "substitution budget as a fraction of n")->capture_default_str();
  o.pstar = cmd->add_option("--pstar", pr.p_star, "erasure budget as a fraction of n")->capture_default_str();
  o.eps = cmd->add_option("-e,--eps", pr.epsilon, "rate slack driving all margins")->capture_default_str();
  if (with_block) {
    o.n = cmd->add_option("-n,--block", pr.n, "block length");
    o.theta = cmd->add_option("--theta", pr.theta, "chunk fraction; n*theta symbols per chunk");
    o.rate = cmd->add_option("--rate", pr.rate, "code rate in q-ary symbols per position");
    o.secrets = cmd->add_option("--secrets", pr.secret_count, "secrets per chunk")->capture_default_str();
  }
  return o;
}

template <typename T>
void overlay(const json& cfg, const char* key, T& dst, const CLI::Option* opt) {
  if (opt != nullptr && opt->count() > 0) return;
  if (cfg.contains(key)) dst = cfg.at(key).get<T>();
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json cfg = json::parse(in);
  if (!cfg.is_object()) throw std::runtime_error("config root must be an object");
  return cfg;
}

double rate_for_messages(long messages, long n, int q) {
  if (messages < 2 || n <= 0) throw std::invalid_argument("message count needs at least 2 messages and a block length");
  return std::log(double(messages)) / (double(n) * std::log(double(q)));
}

// ---------------------------------------------------------------- capacity

int run_capacity(const jamlab::ChannelParams& pr, bool as_json) {
  const auto errors = pr.validate(false, false);
  if (!errors.empty()) return report_errors(errors);
  const jamlab::CapacityResult cap = jamlab::capacity(pr);
  if (as_json) {
    std::cout << json{{"q", pr.q},
                      {"p", pr.p},
                      {"pstar", pr.p_star},
                      {"capacity", cap.value},
                      {"argmin_pbar", cap.argmin_pbar},
                      {"zero_region", cap.zero_region}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << std::setprecision(12) << "capacity " << cap.value;
    if (cap.zero_region)
      std::cout << " (zero region)";
    else
      std::cout << " (argmin pbar " << cap.argmin_pbar << ")";
    std::cout << "\n";
  }
  return 0;
}

// ---------------------------------------------------------- capacity-surface

struct SurfaceArgs {
  jamlab::ChannelParams pr;
  double p_min = 0.0, p_max = -1.0;
  long p_steps = 200;
  double pstar_min = 0.0, pstar_max = -1.0;
  long pstar_steps = 1;
  std::string out_path;
};

int run_surface(SurfaceArgs& a) {
  const auto errors = a.pr.validate(false, false);
  if (!errors.empty()) return report_errors(errors);
  if (a.p_max < 0.0) a.p_max = double(a.pr.q - 1) / (2.0 * a.pr.q);
  if (a.pstar_max < 0.0) a.pstar_max = a.pstar_min;
  if (a.p_steps < 1 || a.pstar_steps < 1) return fail("step counts must be at least 1");

  Sink sink;
  if (!sink.open(a.out_path)) return fail("cannot open output file " + a.out_path);
  std::ostream& os = sink.stream();
  os << provenance("capacity-surface", a.pr) << "\n";
  os << "p,pstar,capacity,argmin_pbar,zero_region\n" << std::setprecision(17);
  for (long i = 0; i < a.pstar_steps; ++i) {
    const double ps = a.pstar_steps == 1
                          ? a.pstar_min
                          : a.pstar_min + (a.pstar_max - a.pstar_min) * double(i) /
                                              double(a.pstar_steps - 1);
    for (long j = 0; j < a.p_steps; ++j) {
      const double p = a.p_steps == 1
                           ? a.p_min
                           : a.p_min + (a.p_max - a.p_min) * double(j) /
                                           double(a.p_steps - 1);
      jamlab::ChannelParams pr = a.pr;
      pr.p = p;
      pr.p_star = ps;
      const jamlab::CapacityResult cap = jamlab::capacity(pr);
      os << p << "," << ps << "," << cap.value << "," << cap.argmin_pbar << ","
         << (cap.zero_region ? 1 : 0) << "\n";
    }
  }
  return 0;
}

// --------------------------------------------------------------- trajectory

int run_trajectory(const jamlab::ChannelParams& pr, const std::string& out_path) {
  const auto errors = pr.validate(true, true);
  if (!errors.empty()) return report_errors(errors);
  Sink sink;
  if (!sink.open(out_path)) return fail("cannot open output file " + out_path);
  std::ostream& os = sink.stream();
  os << provenance("trajectory", pr) << "\n";
  os << "t,x,p_bar,p_hat,p_tilde\n" << std::setprecision(17);
  std::vector<long> ts = pr.chunk_ends();
  ts.push_back(pr.n);
  for (long t : ts) {
    const double x = double(t) / double(pr.n);
    os << t << "," << x << "," << jamlab::p_bar_t(double(t), 0.0, pr) << ",";
    try {
      os << jamlab::p_hat_t(double(t), 0.0, pr);
    } catch (const std::domain_error&) {
    }
    os << ",";
    try {
      os << jamlab::p_tilde_t(double(t), 0.0, pr);
    } catch (const std::domain_error&) {
    }
    os << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------- region

int run_region(jamlab::ChannelParams& pr, const CLI::Option* rate_opt,
               const std::string& out_path) {
  const auto errors = pr.validate(true, true);
  if (!errors.empty()) return report_errors(errors);
  double rate = pr.rate;
  if (rate_opt->count() == 0)
    rate = jamlab::capacity(pr).value - pr.epsilon;
  Sink sink;
  if (!sink.open(out_path)) return fail("cannot open output file " + out_path);
  std::ostream& os = sink.stream();
  os << provenance("region", pr) << " rate=" << std::setprecision(17) << rate << "\n";
  os << "curve,t,t_minus_lambda,value\n";
  for (const jamlab::RegionRow& row : jamlab::region_curves(pr, rate))
    os << row.curve << "," << row.t << "," << row.t_minus_lambda << ","
       << row.value << "\n";
  return 0;
}

// ----------------------------------------------------------------- simulate

struct SimulateArgs {
  jamlab::TrialConfig cfg;
  ParamOptions po;
  std::string adversary_name = "null";
  std::string config_path;
  std::string out_dir;
  bool write_transcripts = false;
  long fixed_message = -1;
  long messages = 0;
  int workers = 1;
  bool as_json = false;
  CLI::Option* adversary_opt = nullptr;
  CLI::Option* pbar_opt = nullptr;
  CLI::Option* lookahead_opt = nullptr;
  CLI::Option* sees_opt = nullptr;
  CLI::Option* clamp_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* message_opt = nullptr;
  CLI::Option* messages_opt = nullptr;
};

int run_simulate(SimulateArgs& a) {
  bool sees_message = false;
  bool allow_clamp = false;
  if (a.sees_opt->count() > 0) sees_message = true;
  if (a.clamp_opt->count() > 0) allow_clamp = true;

  if (!a.config_path.empty()) {
    const json cfg = load_config(a.config_path);
    jamlab::ChannelParams& pr = a.cfg.params;
    overlay(cfg, "q", pr.q, a.po.q);
    overlay(cfg, "p", pr.p, a.po.p);
    overlay(cfg, "pstar", pr.p_star, a.po.pstar);
    overlay(cfg, "epsilon", pr.epsilon, a.po.eps);
    overlay(cfg, "n", pr.n, a.po.n);
    overlay(cfg, "theta", pr.theta, a.po.theta);
    overlay(cfg, "rate", pr.rate, a.po.rate);
    overlay(cfg, "secrets", pr.secret_count, a.po.secrets);
    overlay(cfg, "messages", a.messages, a.messages_opt);
    overlay(cfg, "trials", a.cfg.trials, a.trials_opt);
    overlay(cfg, "seed", a.cfg.master_seed, a.seed_opt);
    overlay(cfg, "workers", a.workers, a.workers_opt);
    overlay(cfg, "message", a.fixed_message, a.message_opt);
    if (cfg.contains("adversary")) {
      const json& adv = cfg.at("adversary");
      overlay(adv, "kind", a.adversary_name, a.adversary_opt);
      overlay(adv, "pbar", a.cfg.adversary.pbar, a.pbar_opt);
      overlay(adv, "lookahead", a.cfg.adversary.lookahead, a.lookahead_opt);
      if (a.sees_opt->count() == 0 && adv.contains("sees_message"))
        sees_message = adv.at("sees_message").get<bool>();
      if (a.clamp_opt->count() == 0 && adv.contains("allow_clamp_b"))
        allow_clamp = adv.at("allow_clamp_b").get<bool>();
    }
  }
  a.cfg.adversary.kind = jamlab::adversary_from_name(a.adversary_name);
  a.cfg.adversary.sees_message = sees_message;
  a.cfg.adversary.allow_clamp_b = allow_clamp;
  if (a.fixed_message >= 0) {
    a.cfg.fixed_message = true;
    a.cfg.message = a.fixed_message;
  }
  if (a.messages > 0)
    a.cfg.params.rate =
        rate_for_messages(a.messages, a.cfg.params.n, a.cfg.params.q);

  const auto errors = a.cfg.params.validate(true, true);
  if (!errors.empty()) return report_errors(errors);

  const jamlab::Codebook cb = jamlab::experiment_codebook(a.cfg);

  namespace fs = std::filesystem;
  std::function<void(const jamlab::Transcript&)> sink;
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    if (a.write_transcripts) {
      fs::create_directories(fs::path(a.out_dir) / "transcripts");
      sink = [&](const jamlab::Transcript& tr) {
        std::ostringstream name;
        name << "trial-" << std::setw(6) << std::setfill('0') << tr.trial
             << ".json";
        std::ofstream out(fs::path(a.out_dir) / "transcripts" / name.str());
        out << jamlab::transcript_to_json(tr).dump(2) << "\n";
      };
    }
  } else if (a.write_transcripts) {
    return fail("--transcripts needs --out DIR");
  }

  const jamlab::ExperimentSummary summary =
      jamlab::run_experiment(cb, a.cfg, a.workers, sink);
  const json j = jamlab::summary_to_json(summary, a.cfg);

  if (!a.out_dir.empty()) {
    std::ofstream out(fs::path(a.out_dir) / "summary.json");
    out << j.dump(2) << "\n";
  }
  if (a.as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "trials " << summary.trials << ": " << summary.decoded_correct
              << " correct, " << summary.decoded_wrong << " wrong, "
              << summary.ambiguous << " ambiguous, " << summary.exhausted
              << " exhausted";
    if (summary.trials > 0) {
      const jamlab::ErrorRate er = jamlab::summarize_error_rate(summary);
      std::cout << std::setprecision(6) << "; failure rate " << er.rate << " ["
                << er.wilson_low << ", " << er.wilson_high << "]";
    }
    std::cout << "\n";
    if (summary.violations > 0)
      std::cout << "warning: " << summary.violations
                << " illegal adversary actions were suppressed\n";
  }
  return summary.violations > 0 ? 1 : 0;
}

// ------------------------------------------------------------------- verify

int run_verify_cmd(jamlab::VerifyOptions& vo, bool single_point,
                   const jamlab::ChannelParams& point, bool as_json) {
  vo.single_point = single_point;
  if (single_point) vo.point = point;
  const jamlab::VerifyReport report = jamlab::run_verify(vo);
  if (as_json) {
    json claims = json::array();
    for (const auto& c : report.claims)
      claims.push_back({{"name", c.name},
                        {"draws", c.draws},
                        {"checks", c.checks},
                        {"violations", c.violations},
                        {"skipped", c.skipped},
                        {"counterexamples", c.counterexamples},
                        {"pass", c.pass()}});
    std::cout << json{{"claims", claims},
                      {"total_draws", report.total_draws},
                      {"all_pass", report.all_pass()}}
                     .dump(2)
              << "\n";
  } else {
    for (const auto& c : report.claims) {
      std::cout << std::left << std::setw(16) << c.name
                << (c.pass() ? "PASS" : "FAIL") << "  checks=" << c.checks
                << " violations=" << c.violations << " skipped=" << c.skipped
                << "\n";
      for (const auto& cx : c.counterexamples)
        std::cout << "    counterexample: " << cx << "\n";
    }
    std::cout << "verify " << (report.all_pass() ? "PASS" : "FAIL") << " ("
              << report.total_draws << " parameter draws)\n";
  }
  return report.all_pass() ? 0 : 1;
}

// ----------------------------------------------------------------- codebook

int run_codebook_gen(jamlab::ChannelParams& pr, long messages,
                     std::uint64_t seed, const std::string& out_path) {
  if (messages > 0) pr.rate = rate_for_messages(messages, pr.n, pr.q);
  const jamlab::Codebook cb = jamlab::generate_codebook(pr, seed);
  jamlab::save_codebook(cb, out_path);
  std::cout << "wrote " << out_path << ": q=" << cb.params.q << " n=" << cb.params.n
            << " chunks=" << cb.chunks << " messages=" << cb.messages
            << " secrets=" << cb.secrets << " seed=" << cb.seed << " ("
            << cb.table.size() << " table bytes)\n";
  return 0;
}

int run_codebook_inspect(const std::string& path, bool as_json) {
  const jamlab::Codebook cb = jamlab::load_codebook(path);
  if (as_json) {
    std::cout << json{{"path", path},
                      {"q", cb.params.q},
                      {"n", cb.params.n},
                      {"theta", cb.params.theta},
                      {"chunks", cb.chunks},
                      {"chunk_len", cb.chunk_len},
                      {"messages", cb.messages},
                      {"secrets", cb.secrets},
                      {"seed", cb.seed},
                      {"table_bytes", cb.table.size()}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << path << ": q=" << cb.params.q << " n=" << cb.params.n
              << " chunks=" << cb.chunks << " chunk_len=" << cb.chunk_len
              << " messages=" << cb.messages << " secrets=" << cb.secrets
              << " seed=" << cb.seed << " (" << cb.table.size()
              << " table bytes)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laboratory for q-ary online error-erasure channels"};
  app.require_subcommand(1);

  // capacity
  jamlab::ChannelParams cap_pr;
  bool cap_json = false;
  CLI::App* cap = app.add_subcommand("capacity", "evaluate the channel capacity at one point");
  add_param_options(cap, cap_pr, false);
  cap->add_flag("--json-diagnostics", cap_json, "emit JSON instead of text");

  // capacity-surface
  SurfaceArgs surf;
  CLI::App* surface = app.add_subcommand("capacity-surface", "capacity on a budget grid, as CSV");
  add_param_options(surface, surf.pr, false);
  surface->add_option("--p-min", surf.p_min, "smallest substitution budget")->capture_default_str();
  surface->add_option("--p-max", surf.p_max, "largest substitution budget (default (q-1)/(2q))");
  surface->add_option("--p-steps", surf.p_steps, "grid points along p")->capture_default_str();
  surface->add_option("--pstar-min", surf.pstar_min, "smallest erasure budget")->capture_default_str();
  surface->add_option("--pstar-max", surf.pstar_max, "largest erasure budget (default: fixed at --pstar-min)");
  surface->add_option("--pstar-steps", surf.pstar_steps, "grid points along pstar")->capture_default_str();
  surface->add_option("-o,--out", surf.out_path, "output CSV path (default stdout)");

  // trajectory
  jamlab::ChannelParams traj_pr;
  std::string traj_out;
  CLI::App* traj = app.add_subcommand("trajectory", "decoder reference curves at chunk ends, as CSV");
  add_param_options(traj, traj_pr, true);
  traj->add_option("-o,--out", traj_out, "output CSV path (default stdout)");

  // region
  jamlab::ChannelParams region_pr;
  std::string region_out;
  CLI::App* region = app.add_subcommand("region", "admissible-region curves for plotting, as CSV");
  ParamOptions region_po = add_param_options(region, region_pr, true);
  region->add_option("-o,--out", region_out, "output CSV path (default stdout)");

  // simulate
  SimulateArgs sim;
  sim.cfg.trials = 100;
  CLI::App* simulate = app.add_subcommand("simulate", "run Monte Carlo coding experiments");
  sim.po = add_param_options(simulate, sim.cfg.params, true);
  sim.messages_opt = simulate->add_option("--messages", sim.messages, "message count (overrides --rate)");
  sim.adversary_opt = simulate->add_option("--adversary", sim.adversary_name,
                                           "null | uniform_random | greedy_push | front_loaded | babble_push")->capture_default_str();
  sim.pbar_opt = simulate->add_option("--pbar", sim.cfg.adversary.pbar, "early error fraction for babble_push")->capture_default_str();
  sim.lookahead_opt = simulate->add_option("--lookahead", sim.cfg.adversary.lookahead, "symbols of input lookahead")->capture_default_str();
  sim.sees_opt = simulate->add_flag("--sees-message", "reveal the message index to the adversary");
  sim.clamp_opt = simulate->add_flag("--allow-clamp-b", "clamp the babble horizon into the block instead of rejecting");
  sim.trials_opt = simulate->add_option("--trials", sim.cfg.trials, "number of trials")->capture_default_str();
  sim.seed_opt = simulate->add_option("--seed", sim.cfg.master_seed, "master seed")->capture_default_str();
  sim.workers_opt = simulate->add_option("--workers", sim.workers, "worker threads")->capture_default_str();
  sim.message_opt = simulate->add_option("--message", sim.fixed_message, "fix the transmitted message index");
  simulate->add_option("--config", sim.config_path, "JSON config file; explicit flags win");
  simulate->add_option("--out", sim.out_dir, "directory for summary.json (and transcripts)");
  simulate->add_flag("--transcripts", sim.write_transcripts, "also write one JSON transcript per trial");
  simulate->add_flag("--json-diagnostics", sim.as_json, "print the summary JSON to stdout");

  // verify
  jamlab::VerifyOptions vo;
  jamlab::ChannelParams verify_pr;
  bool verify_single = false;
  bool verify_json = false;
  CLI::App* verify = app.add_subcommand("verify", "check the analytic decoding claims numerically");
  verify->add_option("--draws", vo.draws_per_q, "parameter draws per alphabet size")->capture_default_str();
  verify->add_option("--qs", vo.qs, "alphabet sizes to draw")->delimiter(',')->capture_default_str();
  verify->add_option("--seed", vo.seed, "draw seed")->capture_default_str();
  verify->add_flag("--single-point", verify_single, "check only the point given by the parameter flags");
  add_param_options(verify, verify_pr, true);
  verify->add_flag("--json-diagnostics", verify_json, "emit JSON instead of text");
  verify->add_option("--debug-margin-scale", vo.margin_scale, "scale the reference-curve margin (fault injection)")->group("");

  // codebook gen | inspect
  CLI::App* codebook = app.add_subcommand("codebook", "generate or inspect codebook files");
  codebook->require_subcommand(1);
  jamlab::ChannelParams gen_pr;
  long gen_messages = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  CLI::App* gen = codebook->add_subcommand("gen", "generate a codebook file");
  add_param_options(gen, gen_pr, true);
  gen->add_option("--messages", gen_messages, "message count (overrides --rate)");
  gen->add_option("--seed", gen_seed, "codebook seed")->capture_default_str();
  gen->add_option("-o,--out", gen_out, "output path")->required();
  std::string inspect_path;
  bool inspect_json = false;
  CLI::App* inspect = codebook->add_subcommand("inspect", "print a codebook file header");
  inspect->add_option("file", inspect_path, "codebook file")->required();
  inspect->add_flag("--json-diagnostics", inspect_json, "emit JSON instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(cap)) return run_capacity(cap_pr, cap_json);
    if (app.got_subcommand(surface)) return run_surface(surf);
    if (app.got_subcommand(traj)) return run_trajectory(traj_pr, traj_out);
    if (app.got_subcommand(region))
      return run_region(region_pr, region_po.rate, region_out);
    if (app.got_subcommand(simulate)) return run_simulate(sim);
    if (app.got_subcommand(verify))
      return run_verify_cmd(vo, verify_single, verify_pr, verify_json);
    if (app.got_subcommand(codebook)) {
      if (codebook->got_subcommand(gen))
        return run_codebook_gen(gen_pr, gen_messages, gen_seed, gen_out);
      return run_codebook_inspect(inspect_path, inspect_json);
    }
  } catch (const json::exception& e) {
    return fail(std::string("config: ") + e.what());
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return 2;
}
