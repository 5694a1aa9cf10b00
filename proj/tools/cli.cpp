#include "swipt/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "swipt/config.hpp"
#include "swipt/errors.hpp"
#include "swipt/parallel.hpp"

namespace swipt {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::int64_t slots = 0;
  std::string out;
  std::string policy;
  int threads = 0;
  double q_req_w = 0.0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* slots_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* policy_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* q_opt = nullptr;
};

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Defaults, then the config file, then flags.
RunConfig resolve(const Flags& f, bool oracle) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.seed_opt->count()) cfg.system.rng_seed = f.seed;
  if (f.slots_opt->count()) {
    if (oracle) {
      cfg.oracle.n_slots = f.slots;
    } else {
      cfg.system.n_slots = f.slots;
      cfg.sweep.eval_slots = f.slots;
      cfg.calibration.batch_slots = std::max<std::int64_t>(100, f.slots);
    }
  }
  if (f.out_opt->count()) cfg.out_dir = f.out;
  if (f.threads_opt->count()) cfg.threads = f.threads;
  if (f.q_opt->count()) {
    cfg.calibration.q_req_w = f.q_req_w;
    cfg.power.q_req_w = f.q_req_w;
  }
  cfg.validate();
  return cfg;
}

// The header records what determines the results; output location and
// worker count do not, so they are left at their defaults.
std::string header_text(const RunConfig& cfg) {
  RunConfig copy = cfg;
  copy.out_dir = RunConfig{}.out_dir;
  copy.threads = 0;
  return std::string("# swipt ") + kToolVersion + "\n" + render_config(copy);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

int cmd_calibrate(const RunConfig& cfg, const std::string& policy, std::ostream& out) {
  if (policy.empty()) throw ConfigError(0, "calibrate needs --policy (mt, pf, et or joint)");
  const UserGeometry geometry = make_geometry(cfg);
  CalibrationReport report;
  if (policy == "joint") {
    report = calibrate_joint(cfg.power, geometry, cfg.system, cfg.calibration);
  } else {
    if (policy != "mt" && policy != "pf" && policy != "et")
      throw ConfigError(0, "unknown policy '" + policy + "'");
    report = calibrate(parse_policy_kind(policy), cfg.calibration, geometry, cfg.system);
  }
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "header.cfg", header_text(cfg));
  write_file(fs::path(cfg.out_dir) / ("calibrate_" + policy + ".trace"), format_trace(report));
  out << "calibrate " << policy << ": " << (report.converged ? "converged" : "not converged")
      << " after " << report.iterations << " iterations, nu=" << format_double(report.duals.nu)
      << " mu=" << format_double(report.duals.mu) << '\n';
  return report.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const UserGeometry geometry = make_geometry(cfg);
  const SweepResult result =
      sweep_re_curve(cfg.sweep, cfg.system, geometry, cfg.calibration, cfg.power);
  const ExperimentSummary summary = summarize(result, cfg.system.rng_seed);
  write_bundle(cfg.out_dir, header_text(cfg), result, summary);
  int below = 0, errors = 0;
  for (const auto& d : summary.dominance) {
    if (!d.error.empty()) ++errors;
    else if (d.margin.margin < -2.0 * d.margin.stderr) ++below;
  }
  out << "sweep: " << result.points.size() << " points, " << summary.calibrations
      << " calibrations (" << summary.skipped << " skipped), " << summary.dominance.size()
      << " dominance checks (" << below << " below -2se, " << errors << " unresolved) -> "
      << cfg.out_dir << '\n';
  return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  using nlohmann::json;
  const UserGeometry geometry = make_geometry(cfg);
  const ChannelTrace trace = generate_trace(
      geometry, StreamKey{cfg.system.rng_seed, StreamTag::kOracle, 0}, cfg.oracle.n_slots);

  std::vector<std::vector<double>> extra;
  json dual = nullptr;
  if (cfg.oracle.inject) {
    try {
      const JointTraceSolution sol = solve_joint_on_trace(trace, cfg.power, cfg.system);
      extra = sol.candidates;
      dual = {{"nu", sol.nu},
              {"mu", sol.mu},
              {"r_sum", sol.aggregate.r_sum},
              {"q_sum", sol.aggregate.q_sum},
              {"p_used", sol.aggregate.p_used},
              {"schedule", sol.schedule},
              {"powers", sol.powers}};
    } catch (const InfeasibleTarget&) {
      // The oracle below reports infeasibility on its own.
    }
  }
  const OracleResult res =
      oracle_joint_exhaustive(trace, cfg.power, cfg.system, cfg.oracle.grid, extra);

  std::vector<std::vector<double>> gains;
  for (std::int64_t i = 0; i < trace.n_slots(); ++i) {
    const auto s = trace.slot(i);
    gains.emplace_back(s.begin(), s.end());
  }
  json record = {
      {"tool_version", kToolVersion},
      {"seed", cfg.system.rng_seed},
      {"n_users", cfg.system.n_users},
      {"n_slots", cfg.oracle.n_slots},
      {"grid", cfg.oracle.grid},
      {"inject", cfg.oracle.inject},
      {"p_max_w", cfg.power.p_max_w},
      {"p_ave_w", cfg.power.p_ave_w},
      {"q_req_w", cfg.power.q_req_w},
      {"distances_m", geometry.distance_m},
      {"gains", gains},
      {"oracle",
       {{"feasible", res.feasible},
        {"r_sum", res.r_sum},
        {"q_sum", res.q_sum},
        {"p_used", res.p_used},
        {"schedule", res.schedule},
        {"powers", res.powers},
        {"combinations", res.combinations}}},
      {"dual", dual},
  };
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "header.cfg", header_text(cfg));
  write_file(fs::path(cfg.out_dir) / "oracle.json", record.dump(2) + "\n");
  if (!res.feasible) {
    out << "oracle: infeasible target q_req_w=" << format_double(cfg.power.q_req_w) << '\n';
    return kExitInfeasible;
  }
  out << "oracle: r_sum=" << format_double(res.r_sum) << " q_sum=" << format_double(res.q_sum)
      << " p_used=" << format_double(res.p_used) << " over " << res.combinations
      << " combinations\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SWIPT multiuser scheduling: dual calibration, R-E sweeps and oracles", "swipt"};
  app.require_subcommand(1, 1);
  Flags f;
  app.add_option("--config", f.config, "Config file (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  f.seed_opt = app.add_option("--seed", f.seed, "Override [env] rng_seed");
  f.slots_opt = app.add_option("--slots", f.slots,
                               "Slots per batch and evaluation; oracle: trace length")
                    ->check(CLI::PositiveNumber);
  f.out_opt = app.add_option("--out", f.out, "Output directory");
  f.policy_opt = app.add_option("--policy", f.policy,
                                "calibrate: mt|pf|et|joint; sweep: comma-separated subset");
  f.threads_opt = app.add_option("--threads", f.threads, "Worker cap, 0 = all cores")
                      ->check(CLI::NonNegativeNumber);
  f.q_opt = app.add_option("--q-req", f.q_req_w, "Override the harvest target in W")
                ->check(CLI::NonNegativeNumber);

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate one policy at q_req");
  auto* sweep_cmd = app.add_subcommand("sweep", "R-E sweep with baselines and dominance checks");
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive joint power/schedule optimum");
  for (auto* sub : {calibrate_cmd, sweep_cmd, oracle_cmd}) sub->fallthrough();
  calibrate_cmd->add_option("policy", f.policy, "mt|pf|et|joint");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    const bool is_oracle = oracle_cmd->parsed();
    RunConfig cfg = resolve(f, is_oracle);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    set_worker_threads(cfg.threads == 0 ? hw : static_cast<unsigned>(cfg.threads));
    if (sweep_cmd->parsed() && !f.policy.empty()) cfg.sweep.policies = split_commas(f.policy);
    if (sweep_cmd->parsed()) {
      cfg.sweep.validate();
      return cmd_sweep(cfg, out);
    }
    if (is_oracle) return cmd_oracle(cfg, out);
    return cmd_calibrate(cfg, f.policy, out);
  } catch (const ConfigError& e) {
    err << "swipt: config error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    err << "swipt: invalid value: " << e.what() << '\n';
    return kExitParse;
  } catch (const InfeasibleTarget& e) {
    err << "swipt: infeasible target: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const InstanceTooLarge& e) {
    err << "swipt: instance too large: " << e.what() << '\n';
    return kExitTooLarge;
  } catch (const std::exception& e) {
    err << "swipt: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace swipt
