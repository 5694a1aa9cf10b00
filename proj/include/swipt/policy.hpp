#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swipt/env.hpp"

namespace swipt {

/// Lagrange multipliers parameterizing the optimal schedulers.
///   nu    : harvested-energy constraint (>= 0)
///   gamma : per-user access-share constraint (PF), unconstrained sign
///   theta : per-user throughput weights (ET), each in [0, 1]
///   mu    : average transmit power constraint (joint power allocation)
struct DualState {
  double nu = 0.0;
  std::vector<double> gamma;
  std::vector<double> theta;
  double mu = 0.0;

  /// nu = mu = 0, gamma = 0, theta uniform on the simplex.
  static DualState zeros(int n_users);
};

enum class PolicyKind { kMT, kPF, kET, kOrderSNR, kOrderNSNR, kOrderET };

std::string_view to_string(PolicyKind kind);
/// Accepts the names produced by to_string (case-insensitive). Throws
/// std::invalid_argument for anything else.
PolicyKind parse_policy_kind(std::string_view name);

/// A per-slot user selection rule. `order` (1..N) applies to the SNR and
/// N-SNR order baselines; `allowed_orders` (subset of 1..N) to order-ET.
struct PolicySpec {
  PolicyKind kind = PolicyKind::kMT;
  DualState duals;
  int order = 0;
  std::vector<int> allowed_orders;

  static PolicySpec mt(double nu, int n_users);
  static PolicySpec pf(double nu, std::vector<double> gamma);
  static PolicySpec et(double nu, std::vector<double> theta);
  static PolicySpec order_snr(int j);
  static PolicySpec order_nsnr(int j);
  static PolicySpec order_et(std::vector<int> allowed_orders);

  bool is_optimal() const {
    return kind == PolicyKind::kMT || kind == PolicyKind::kPF || kind == PolicyKind::kET;
  }

  /// Throws std::invalid_argument on out-of-range orders, negative nu,
  /// theta outside [0, 1], an all-zero theta, or vector size mismatch.
  void validate(int n_users) const;
};

/// Outcome of one slot. User indices are 0-based.
struct SlotDecision {
  std::int64_t slot_index = 0;
  int selected = 0;
  double tx_power_w = 0.0;
  double rate = 0.0;
  std::vector<double> harvested;
};

std::vector<double> metric_mt(const SlotChannel& slot, const DualState& duals,
                              const LinkBudget& link);
std::vector<double> metric_pf(const SlotChannel& slot, const DualState& duals,
                              const LinkBudget& link);
std::vector<double> metric_et(const SlotChannel& slot, const DualState& duals,
                              const LinkBudget& link);

/// First index of the maximum; exact ties resolve to the lowest index.
int argmax_lowest(std::span<const double> values);

/// User whose value has ascending rank j (1-based). Equal values are
/// ranked by user index.
int user_at_order(std::span<const double> values, int j);

/// Fills rate and harvested power for a fixed-power decision.
SlotDecision make_decision(const SlotChannel& slot, int selected, double tx_power_w,
                           const LinkBudget& link);

SlotDecision select_optimal(const SlotChannel& slot, const PolicySpec& spec,
                            const LinkBudget& link);
SlotDecision select_order_snr(const SlotChannel& slot, int j, const LinkBudget& link);
SlotDecision select_order_nsnr(const SlotChannel& slot, const UserGeometry& geometry, int j,
                               const LinkBudget& link);

/// Running state of the order-based equal-throughput baseline: the
/// cumulative mean throughput of every user over the slots seen so far.
struct OrderEtState {
  std::vector<double> running_avg;
  std::int64_t slots_seen = 0;

  explicit OrderEtState(int n_users) : running_avg(static_cast<std::size_t>(n_users), 0.0) {}
};

/// Picks the minimum-throughput user among those whose N-SNR order is in
/// `allowed_orders`, then folds the slot into `state`.
SlotDecision select_order_et(const SlotChannel& slot, const UserGeometry& geometry,
                             std::span<const int> allowed_orders, OrderEtState& state,
                             const LinkBudget& link);

/// Allocation-free selector used by the Monte Carlo loops. Carries the
/// order-ET accumulator, so one instance must see slots in order.
class SlotSelector {
 public:
  SlotSelector(const PolicySpec& spec, const LinkBudget& link, const UserGeometry& geometry);

  /// Returns the selected user. `rates` receives C_n for every user.
  int select(std::span<const double> gains, std::span<double> rates);

  const PolicySpec& spec() const { return spec_; }

 private:
  PolicySpec spec_;
  double tx_power_w_;
  std::vector<double> noise_w_;
  std::vector<double> energy_scale_;  // xi_n P
  std::vector<double> inv_mean_gain_;
  std::vector<double> scratch_;
  std::vector<char> allowed_mask_;
  OrderEtState et_state_;
};

}  // namespace swipt
