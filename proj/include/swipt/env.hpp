#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swipt/rng.hpp"

namespace swipt {

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);

/// Physical constants of one experiment plus its seed and slot count.
/// Per-user efficiency/noise overrides are optional; when empty every
/// user shares the scalar value.
struct SystemParams {
  int n_users = 4;
  double tx_power_dbm = 40.0;
  double noise_power_dbm = -62.0;
  double conversion_efficiency = 0.5;
  double path_loss_exponent = 3.6;
  double max_distance_m = 100.0;
  double ref_distance_m = 2.0;
  double ap_gain_dbi = 10.0;
  double ut_gain_dbi = 2.0;
  double carrier_hz = 915e6;
  double bandwidth_hz = 200e3;
  std::int64_t n_slots = 100000;
  std::uint64_t rng_seed = 1;
  std::vector<double> efficiency_per_user;
  std::vector<double> noise_dbm_per_user;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  double tx_power_w() const { return dbm_to_watts(tx_power_dbm); }
  double noise_w(int user) const;
  double efficiency(int user) const;
};

/// Per-user link constants resolved once from SystemParams.
struct LinkBudget {
  double tx_power_w = 0.0;
  std::vector<double> noise_w;
  std::vector<double> efficiency;

  static LinkBudget from(const SystemParams& params);
  int n_users() const { return static_cast<int>(noise_w.size()); }
};

struct UserGeometry {
  std::vector<double> distance_m;
  std::vector<double> mean_gain;

  int n_users() const { return static_cast<int>(mean_gain.size()); }
};

/// Log-distance path gain anchored on free space at the reference
/// distance, including both antenna gains. Linear units.
double mean_channel_gain(const SystemParams& params, double distance_m);

/// Draws user distances uniformly on [ref, max] from the placement stream.
/// User k's distance depends only on (seed, k), so a larger population
/// extends a smaller one with the same seed.
UserGeometry place_users(const SystemParams& params);

/// Builds geometry for explicit distances (clamped validation applies).
UserGeometry geometry_from_distances(const SystemParams& params, std::vector<double> distances);

struct SlotChannel {
  std::int64_t slot_index = 0;
  std::vector<double> gains;
};

/// h_n = Omega_n * e_n with e_n ~ Exp(1), independent across users.
void draw_slot_into(const UserGeometry& geometry, Engine& rng, std::span<double> gains);
SlotChannel draw_slot(const UserGeometry& geometry, Engine& rng, std::int64_t slot_index);

double rate_of(double p_tx_w, double gain, double noise_w);
double energy_of(double p_tx_w, double gain, double efficiency);

/// Slots of one evaluation are split into contiguous blocks, each with its
/// own engine and at least kMinBlockSlots slots when the trace allows.
/// Block boundaries fix the trace, so results are independent
/// of how blocks are distributed over workers.
struct BlockLayout {
  static constexpr std::int64_t kMaxBlocks = 100;
  static constexpr std::int64_t kMinBlockSlots = 50;

  std::int64_t n_slots = 0;
  std::int64_t n_blocks = 0;

  explicit BlockLayout(std::int64_t slots);
  std::int64_t begin(std::int64_t block) const { return block * n_slots / n_blocks; }
  std::int64_t end(std::int64_t block) const { return (block + 1) * n_slots / n_blocks; }
};

/// Fills `gains` (row-major, (end-begin) x N) with the slots of one block.
void draw_block(const UserGeometry& geometry, const StreamKey& key, const BlockLayout& layout,
                std::int64_t block, std::vector<double>& gains);

/// A materialized channel trace, row-major T x N.
class ChannelTrace {
 public:
  ChannelTrace() = default;
  ChannelTrace(int n_users, std::vector<double> gains);

  int n_users() const { return n_users_; }
  std::int64_t n_slots() const {
    return n_users_ == 0 ? 0 : static_cast<std::int64_t>(gains_.size()) / n_users_;
  }
  std::span<const double> slot(std::int64_t i) const {
    return {gains_.data() + i * n_users_, static_cast<std::size_t>(n_users_)};
  }
  std::span<const double> data() const { return gains_; }

 private:
  int n_users_ = 0;
  std::vector<double> gains_;
};

/// Same draws as an evaluation over `n_slots` with stream `key`.
ChannelTrace generate_trace(const UserGeometry& geometry, const StreamKey& key,
                            std::int64_t n_slots);

inline StreamKey evaluation_stream(const SystemParams& params, std::uint64_t index = 0) {
  return StreamKey{params.rng_seed, StreamTag::kEvaluation, index};
}

}  // namespace swipt
