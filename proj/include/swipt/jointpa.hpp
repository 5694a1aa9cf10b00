#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swipt/calibrate.hpp"
#include "swipt/env.hpp"
#include "swipt/montecarlo.hpp"

namespace swipt {

/// Power limits of the joint scheduling and power allocation problem.
struct PowerConfig {
  double p_max_w = 39.810717055349734;  // 46 dBm
  double p_ave_w = 10.0;
  double q_req_w = 0.0;

  void validate() const;
};

struct JointDecision {
  std::int64_t slot_index = 0;
  int selected = 0;
  double tx_power_w = 0.0;
  double rate = 0.0;
  std::vector<double> harvested;
};

/// Maximizer of log2(1 + P h / noise) + slope * P over [0, p_max].
double per_slot_power(double gain, double noise_w, double slope, double p_max_w);
double per_slot_objective(double power_w, double gain, double noise_w, double slope);

/// Per-slot dual maximizer: every candidate user gets its optimal power,
/// the user with the largest Lagrangian value is served.
JointDecision select_joint(const SlotChannel& slot, double nu, double mu, const PowerConfig& cfg,
                           const LinkBudget& link);

/// Allocation-free version of select_joint for the Monte Carlo loops.
class JointSelector {
 public:
  JointSelector(double nu, double mu, const PowerConfig& cfg, const LinkBudget& link);

  /// Returns the slot outcome; `powers`, if non-empty, receives P*_n.
  SlotOutcome select(std::span<const double> gains, std::span<double> powers = {});

 private:
  double nu_, mu_, p_max_;
  std::vector<double> noise_w_;
  std::vector<double> efficiency_;
  std::vector<double> weighted_;
};

PolicyAggregate evaluate_joint(double nu, double mu, const PowerConfig& cfg,
                               const UserGeometry& geometry, const SystemParams& params,
                               std::int64_t n_slots, const StreamKey& key);
PolicyAggregate evaluate_joint_on_trace(double nu, double mu, const PowerConfig& cfg,
                                        const ChannelTrace& trace, const SystemParams& params);

/// Upper bound on the average harvest under (p_max, p_ave): full power in
/// the slots with the largest best-case idle-user gain, up to the budget.
EnergyBound joint_max_harvest_estimate(const PowerConfig& cfg, const UserGeometry& geometry,
                                       const SystemParams& params, std::int64_t n_slots);

/// Simultaneous projected subgradient on (nu, mu). The report's `policy`
/// is "joint" and the duals carry nu and mu.
CalibrationReport calibrate_joint(const PowerConfig& cfg, const UserGeometry& geometry,
                                  const SystemParams& params, const CalibrationConfig& calib);

/// Dual solution on a fixed trace: mu by bisection on the power budget for
/// each nu, nu by bisection on the harvest target.
struct JointTraceSolution {
  double nu = 0.0;
  double mu = 0.0;
  PolicyAggregate aggregate;
  std::vector<int> schedule;
  std::vector<double> powers;
  /// Per slot, the optimal power of every user at (nu, mu).
  std::vector<std::vector<double>> candidates;
};
JointTraceSolution solve_joint_on_trace(const ChannelTrace& trace, const PowerConfig& cfg,
                                        const SystemParams& params);

/// Power levels searched by the oracle: 0 plus log-spaced points spanning
/// three decades up to p_max.
std::vector<double> oracle_power_grid(double p_max_w, int grid_size);

struct OracleResult {
  bool feasible = false;
  double r_sum = 0.0;
  double q_sum = 0.0;
  double p_used = 0.0;
  std::vector<int> schedule;
  std::vector<double> powers;
  std::int64_t combinations = 0;
};

/// Largest number of (user, power) combinations the oracle will enumerate.
inline constexpr double kOracleMaxCombinations = 1e8;

/// Exhaustive search over schedules and grid powers on a fixed trace,
/// subject to the finite-trace power and harvest constraints. `extra`
/// optionally adds per-slot power candidates to the grid. Throws
/// InstanceTooLarge beyond kOracleMaxCombinations.
OracleResult oracle_joint_exhaustive(const ChannelTrace& trace, const PowerConfig& cfg,
                                     const SystemParams& params, int grid_size,
                                     const std::vector<std::vector<double>>& extra = {});

}  // namespace swipt
