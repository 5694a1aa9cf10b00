#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "swipt/env.hpp"
#include "swipt/montecarlo.hpp"
#include "swipt/policy.hpp"

namespace swipt {

/// Settings of the projected-subgradient dual calibration.
///
/// Step sizes are dimensionless: each multiplier moves by
/// step / sqrt(1 + k) times its natural scale (derived from a pilot batch)
/// times the normalized constraint residual, where k counts gradient
/// reversals so far (Kesten's rule).
struct CalibrationConfig {
  std::int64_t batch_slots = 50000;
  double step_nu = 0.1;
  double step_gamma = 0.5;
  double step_theta = 0.3;
  double step_mu = 0.5;
  int max_iters = 600;
  /// Relative tolerance on the energy residual; absolute on access shares.
  double tol_feasibility = 0.005;
  /// Relative tolerance on the ET throughput spread (max-min)/mean.
  double tol_fairness = 0.05;
  double q_req_w = 0.0;
  /// Consecutive in-tolerance iterations required to declare convergence.
  int stable_iters = 3;

  void validate() const;

  /// Slots behind the energy-bound estimates: ten batches, at most 1e5,
  /// never less than one batch.
  std::int64_t pilot_slots() const {
    return std::max<std::int64_t>(batch_slots, std::min<std::int64_t>(100000, 10 * batch_slots));
  }
};

struct IterationRecord {
  int m = 0;
  double nu = 0.0;
  double mu = 0.0;
  double q_sum = 0.0;
  double r_sum = 0.0;
  double p_used = 0.0;
  double energy_residual = 0.0;
  double share_residual = 0.0;
  double throughput_spread = 0.0;
  double power_residual = 0.0;
  std::vector<double> shares;
  std::vector<double> user_rate;
};

struct CalibrationReport {
  std::string policy;
  double q_req_w = 0.0;
  DualState duals;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iterations = 0;
  std::string note;
};

/// Largest |share_n - 1/N| over users.
double share_residual(const PolicyAggregate& agg);
/// (max - min) / mean of the per-user throughputs.
double throughput_spread(const std::vector<double>& user_rate);

/// Natural magnitudes used to make the dual steps dimensionless.
struct DualScales {
  double rate = 0.0;    // mean C_n(i) over users and slots
  double energy = 0.0;  // mean Q_n(i) over users and slots
  double nu = 0.0;      // rate / energy
};

DualScales pilot_scales(const UserGeometry& geometry, const SystemParams& params,
                        std::int64_t n_slots);

/// Time averages of `spec` over `n_slots` fresh slots from `key`.
PolicyAggregate evaluate_policy(const PolicySpec& spec, const UserGeometry& geometry,
                                const SystemParams& params, std::int64_t n_slots,
                                const StreamKey& key);
PolicyAggregate evaluate_policy(const PolicySpec& spec, const UserGeometry& geometry,
                                const SystemParams& params, std::int64_t n_slots);

/// Replays a fixed trace through `spec`.
PolicyAggregate evaluate_on_trace(const PolicySpec& spec, const ChannelTrace& trace,
                                  const UserGeometry& geometry, const SystemParams& params);
std::vector<int> selections_on_trace(const PolicySpec& spec, const ChannelTrace& trace,
                                     const UserGeometry& geometry, const SystemParams& params);

/// Harvest of the nu -> infinity MT policy (always serve argmin xi_n h_n),
/// the largest average sum harvest any fixed-power schedule can reach.
struct EnergyBound {
  double q_max = 0.0;
  double stderr = 0.0;
};
EnergyBound max_harvest_estimate(const UserGeometry& geometry, const SystemParams& params,
                                 std::int64_t n_slots);

/// Projected subgradient calibration of nu for the MT metric. Throws
/// InfeasibleTarget when q_req exceeds the energy bound by more than
/// three standard errors.
CalibrationReport calibrate_mt(const CalibrationConfig& cfg, const UserGeometry& geometry,
                               const SystemParams& params);
/// Calibrates nu and the access-share multipliers gamma.
CalibrationReport calibrate_pf(const CalibrationConfig& cfg, const UserGeometry& geometry,
                               const SystemParams& params);
/// Calibrates nu and the throughput weights theta (kept on the simplex).
CalibrationReport calibrate_et(const CalibrationConfig& cfg, const UserGeometry& geometry,
                               const SystemParams& params);
/// Dispatches on kind (MT, PF or ET).
CalibrationReport calibrate(PolicyKind kind, const CalibrationConfig& cfg,
                            const UserGeometry& geometry, const SystemParams& params);

PolicySpec policy_from_report(PolicyKind kind, const CalibrationReport& report);

/// Smallest nu (to bisection precision) whose MT schedule on the fixed
/// trace harvests at least q_req. Throws InfeasibleTarget if even the
/// energy-limit schedule falls short.
struct TraceNuSolution {
  double nu = 0.0;
  PolicyAggregate aggregate;
};
TraceNuSolution bisect_nu_on_trace(const ChannelTrace& trace, const UserGeometry& geometry,
                                   const SystemParams& params, double q_req_w);

}  // namespace swipt
