#include "swipt/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace swipt {

namespace {
constexpr double kSpeedOfLight = 299792458.0;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}
}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void SystemParams::validate() const {
  require(n_users >= 2, "n_users must be at least 2");
  require(conversion_efficiency >= 0.0 && conversion_efficiency <= 1.0,
          "conversion_efficiency must lie in [0, 1]");
  require(ref_distance_m > 0.0 && max_distance_m > 0.0, "distances must be positive");
  require(ref_distance_m < max_distance_m, "ref_distance_m must be below max_distance_m");
  require(n_slots >= 1, "n_slots must be at least 1");
  require(carrier_hz > 0.0, "carrier_hz must be positive");
  require(std::isfinite(tx_power_dbm) && std::isfinite(noise_power_dbm),
          "power levels must be finite");
  require(path_loss_exponent > 0.0, "path_loss_exponent must be positive");
  require(efficiency_per_user.empty() ||
              static_cast<int>(efficiency_per_user.size()) == n_users,
          "efficiency_per_user must list one value per user");
  for (double xi : efficiency_per_user)
    require(xi >= 0.0 && xi <= 1.0, "per-user efficiency must lie in [0, 1]");
  require(noise_dbm_per_user.empty() || static_cast<int>(noise_dbm_per_user.size()) == n_users,
          "noise_dbm_per_user must list one value per user");
}

double SystemParams::noise_w(int user) const {
  return dbm_to_watts(noise_dbm_per_user.empty() ? noise_power_dbm
                                                 : noise_dbm_per_user.at(user));
}

double SystemParams::efficiency(int user) const {
  return efficiency_per_user.empty() ? conversion_efficiency : efficiency_per_user.at(user);
}

LinkBudget LinkBudget::from(const SystemParams& params) {
  LinkBudget link;
  link.tx_power_w = params.tx_power_w();
  link.noise_w.resize(params.n_users);
  link.efficiency.resize(params.n_users);
  for (int n = 0; n < params.n_users; ++n) {
    link.noise_w[n] = params.noise_w(n);
    link.efficiency[n] = params.efficiency(n);
  }
  return link;
}

double mean_channel_gain(const SystemParams& params, double distance_m) {
  const double wavelength = kSpeedOfLight / params.carrier_hz;
  const double anchor = wavelength / (4.0 * std::numbers::pi * params.ref_distance_m);
  const double antennas = db_to_linear(params.ap_gain_dbi + params.ut_gain_dbi);
  return antennas * anchor * anchor *
         std::pow(params.ref_distance_m / distance_m, params.path_loss_exponent);
}

UserGeometry geometry_from_distances(const SystemParams& params, std::vector<double> distances) {
  UserGeometry geometry;
  geometry.mean_gain.reserve(distances.size());
  for (double d : distances) {
    if (!(d >= params.ref_distance_m && d <= params.max_distance_m))
      throw std::invalid_argument("user distance " + std::to_string(d) +
                                  " m lies outside [ref_distance_m, max_distance_m]");
    geometry.mean_gain.push_back(mean_channel_gain(params, d));
  }
  geometry.distance_m = std::move(distances);
  return geometry;
}

UserGeometry place_users(const SystemParams& params) {
  params.validate();
  const StreamKey key{params.rng_seed, StreamTag::kPlacement, 0};
  std::vector<double> distances(params.n_users);
  for (int n = 0; n < params.n_users; ++n) {
    Engine rng = key.engine(static_cast<std::uint64_t>(n));
    std::uniform_real_distribution<double> uniform(params.ref_distance_m, params.max_distance_m);
    distances[n] = uniform(rng);
  }
  return geometry_from_distances(params, std::move(distances));
}

void draw_slot_into(const UserGeometry& geometry, Engine& rng, std::span<double> gains) {
  std::exponential_distribution<double> fading(1.0);
  for (std::size_t n = 0; n < gains.size(); ++n) gains[n] = geometry.mean_gain[n] * fading(rng);
}

SlotChannel draw_slot(const UserGeometry& geometry, Engine& rng, std::int64_t slot_index) {
  SlotChannel slot{slot_index, std::vector<double>(geometry.mean_gain.size())};
  draw_slot_into(geometry, rng, slot.gains);
  return slot;
}

double rate_of(double p_tx_w, double gain, double noise_w) {
  if (!(noise_w > 0.0)) throw std::invalid_argument("noise power must be positive");
  return std::log2(1.0 + p_tx_w * gain / noise_w);
}

double energy_of(double p_tx_w, double gain, double efficiency) {
  return efficiency * p_tx_w * gain;
}

BlockLayout::BlockLayout(std::int64_t slots)
    : n_slots(slots),
      n_blocks(std::clamp<std::int64_t>(slots / kMinBlockSlots, std::clamp<std::int64_t>(slots, 1, 2),
                                        kMaxBlocks)) {}

void draw_block(const UserGeometry& geometry, const StreamKey& key, const BlockLayout& layout,
                std::int64_t block, std::vector<double>& gains) {
  const auto n = static_cast<std::size_t>(geometry.n_users());
  const auto count = static_cast<std::size_t>(layout.end(block) - layout.begin(block));
  gains.resize(count * n);
  Engine rng = key.engine(static_cast<std::uint64_t>(block));
  for (std::size_t s = 0; s < count; ++s)
    draw_slot_into(geometry, rng, std::span<double>(gains.data() + s * n, n));
}

ChannelTrace::ChannelTrace(int n_users, std::vector<double> gains)
    : n_users_(n_users), gains_(std::move(gains)) {
  if (n_users_ <= 0 || gains_.size() % static_cast<std::size_t>(n_users_) != 0)
    throw std::invalid_argument("trace size is not a multiple of the user count");
}

ChannelTrace generate_trace(const UserGeometry& geometry, const StreamKey& key,
                            std::int64_t n_slots) {
  const BlockLayout layout(n_slots);
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(n_slots * geometry.n_users()));
  std::vector<double> block_gains;
  for (std::int64_t b = 0; b < layout.n_blocks; ++b) {
    draw_block(geometry, key, layout, b, block_gains);
    all.insert(all.end(), block_gains.begin(), block_gains.end());
  }
  return ChannelTrace(geometry.n_users(), std::move(all));
}

}  // namespace swipt
