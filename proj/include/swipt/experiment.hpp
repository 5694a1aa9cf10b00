#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "swipt/calibrate.hpp"
#include "swipt/env.hpp"
#include "swipt/jointpa.hpp"

namespace swipt {

/// What a sweep runs. Optimal policies (mt, pf, et, joint) are calibrated
/// per q_req level; each of mt, pf and et brings its order-based baseline
/// (order_snr, order_nsnr, order_et) when `baselines` is set.
struct SweepPlan {
  std::vector<std::string> policies{"mt", "pf", "et", "joint"};
  /// Explicit q_req levels in W. Empty selects the default grid.
  std::vector<double> q_grid_w;
  /// Default grid: q_req = 0 plus grid_points - 1 log-spaced levels from
  /// the policy's own unconstrained harvest up to grid_top_fraction of the
  /// estimated maximum harvest.
  int grid_points = 12;
  double grid_top_fraction = 0.95;
  /// Held-out slots per evaluation.
  std::int64_t eval_slots = 100000;
  int repetitions = 1;
  bool baselines = true;

  void validate() const;
};

struct REPoint {
  std::string policy;
  /// Order j of an order-based point (0 for optimal policies).
  int order = 0;
  double q_req_w = 0.0;
  double q_sum_w = 0.0;
  double r_sum_bpcu = 0.0;
  double p_used_w = 0.0;
  double nu = 0.0;
  double mu = 0.0;
  double stderr_q = 0.0;
  double stderr_r = 0.0;
  bool converged = true;
  bool skipped = false;
  std::string note;
};

/// Everything a sweep produced. `reports` holds one calibration report per
/// calibrated point, in the order the points were calibrated.
struct SweepResult {
  UserGeometry geometry;
  std::vector<REPoint> points;
  std::vector<CalibrationReport> reports;
};

/// Curve and baseline for each optimal policy.
std::string baseline_of(const std::string& policy);
bool is_optimal_policy(const std::string& policy);

/// Order-based points: j = 1..N, evaluated on the held-out streams.
std::vector<REPoint> baseline_points(const std::string& baseline, const UserGeometry& geometry,
                                     const SystemParams& params, const SweepPlan& plan);

/// Calibrates every (policy, q_req) of the plan and evaluates each result
/// on held-out streams disjoint from the calibration batches. Infeasible
/// and non-converged levels become annotated skipped points. Points are
/// sorted by achieved harvest within each policy.
SweepResult sweep_re_curve(const SweepPlan& plan, const SystemParams& params,
                           const UserGeometry& geometry, const CalibrationConfig& calib,
                           const PowerConfig& power);

struct DominanceMargin {
  std::string baseline;
  int order = 0;
  double q_sum_w = 0.0;
  double r_baseline = 0.0;
  double r_curve = 0.0;
  double margin = 0.0;
  double stderr = 0.0;
};

/// Rate of `curve` (resolved points only) interpolated at `point`'s
/// harvest, minus the point's rate. Below the curve's lowest harvest the
/// curve is extended flat when that point is unconstrained (nu = 0), since
/// a smaller target leaves the same optimum. Throws ExtrapolationRequired
/// otherwise, and when the curve has fewer than two points.
DominanceMargin dominance_margin(const std::vector<REPoint>& curve, const REPoint& point);
std::vector<DominanceMargin> dominance_check(const std::vector<REPoint>& curve,
                                             const std::vector<REPoint>& baseline_points);

/// Points of one policy, in stored order.
std::vector<REPoint> points_of(const std::vector<REPoint>& points, const std::string& policy);

struct DominanceEntry {
  std::string curve;
  DominanceMargin margin;
  std::string error;
};

struct ExperimentSummary {
  std::string tool_version;
  std::string generated_at;
  std::uint64_t seed = 0;
  std::vector<double> distances_m;
  std::vector<REPoint> points;
  std::vector<DominanceEntry> dominance;
  int calibrations = 0;
  int converged = 0;
  int skipped = 0;
};

/// Collects the points and runs dominance_check for every optimal policy
/// against its baseline; failures are recorded, not thrown.
ExperimentSummary summarize(const SweepResult& result, std::uint64_t seed);

inline constexpr const char* kToolVersion = "0.1.0";

/// Writes `<dir>/header.cfg` (the given config text), one CSV per policy,
/// calibration traces under `<dir>/traces/`, and `<dir>/summary.json`.
void write_bundle(const std::filesystem::path& dir, const std::string& header_text,
                  const SweepResult& result, const ExperimentSummary& summary);

/// One line per iteration, then a `#`-prefixed summary block.
std::string format_trace(const CalibrationReport& report);

std::string summary_to_json(const ExperimentSummary& summary);
ExperimentSummary summary_from_json(const std::string& text);
ExperimentSummary read_summary(const std::filesystem::path& file);

/// Fixed CSV layout shared by every policy file.
inline constexpr const char* kCsvHeader = "policy,q_req_w,q_sum_w,r_sum_bpcu,nu,mu,stderr_q,stderr_r";
std::string format_csv(const std::vector<REPoint>& points);

/// Shortest text that parses back to the same double ("inf", "nan" for
/// non-finite values).
std::string format_double(double value);

}  // namespace swipt
