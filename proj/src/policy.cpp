#include "swipt/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace swipt {

namespace {

struct KindName {
  PolicyKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {PolicyKind::kMT, "mt"},
    {PolicyKind::kPF, "pf"},
    {PolicyKind::kET, "et"},
    {PolicyKind::kOrderSNR, "order_snr"},
    {PolicyKind::kOrderNSNR, "order_nsnr"},
    {PolicyKind::kOrderET, "order_et"},
};

void check_size(const std::vector<double>& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n)
    throw std::invalid_argument(std::string(what) + " must have one entry per user");
}

// Limit nu -> +inf: the energy term dominates and the policy selects the
// user whose loss of harvest is smallest.
bool energy_limit(const DualState& duals) { return std::isinf(duals.nu); }

}  // namespace

DualState DualState::zeros(int n_users) {
  DualState d;
  d.gamma.assign(static_cast<std::size_t>(n_users), 0.0);
  d.theta.assign(static_cast<std::size_t>(n_users), 1.0 / n_users);
  return d;
}

std::string_view to_string(PolicyKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& kn : kKindNames)
    if (kn.name == lower) return kn.kind;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

PolicySpec PolicySpec::mt(double nu, int n_users) {
  PolicySpec spec;
  spec.kind = PolicyKind::kMT;
  spec.duals = DualState::zeros(n_users);
  spec.duals.nu = nu;
  return spec;
}

PolicySpec PolicySpec::pf(double nu, std::vector<double> gamma) {
  PolicySpec spec;
  spec.kind = PolicyKind::kPF;
  spec.duals = DualState::zeros(static_cast<int>(gamma.size()));
  spec.duals.nu = nu;
  spec.duals.gamma = std::move(gamma);
  return spec;
}

PolicySpec PolicySpec::et(double nu, std::vector<double> theta) {
  PolicySpec spec;
  spec.kind = PolicyKind::kET;
  spec.duals = DualState::zeros(static_cast<int>(theta.size()));
  spec.duals.nu = nu;
  spec.duals.theta = std::move(theta);
  return spec;
}

PolicySpec PolicySpec::order_snr(int j) {
  PolicySpec spec;
  spec.kind = PolicyKind::kOrderSNR;
  spec.order = j;
  return spec;
}

PolicySpec PolicySpec::order_nsnr(int j) {
  PolicySpec spec;
  spec.kind = PolicyKind::kOrderNSNR;
  spec.order = j;
  return spec;
}

PolicySpec PolicySpec::order_et(std::vector<int> allowed_orders) {
  PolicySpec spec;
  spec.kind = PolicyKind::kOrderET;
  spec.allowed_orders = std::move(allowed_orders);
  return spec;
}

void PolicySpec::validate(int n_users) const {
  switch (kind) {
    case PolicyKind::kMT:
    case PolicyKind::kPF:
    case PolicyKind::kET:
      if (!(duals.nu >= 0.0)) throw std::invalid_argument("nu must be non-negative");
      if (!(duals.mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
      if (kind == PolicyKind::kPF) {
        check_size(duals.gamma, n_users, "gamma");
        if (std::isinf(duals.nu)) throw std::invalid_argument("PF requires a finite nu");
      }
      if (kind == PolicyKind::kET) {
        check_size(duals.theta, n_users, "theta");
        double sum = 0.0;
        for (double t : duals.theta) {
          if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
          sum += t;
        }
        if (sum <= 0.0) throw std::invalid_argument("theta must not be all zero");
      }
      break;
    case PolicyKind::kOrderSNR:
    case PolicyKind::kOrderNSNR:
      if (order < 1 || order > n_users)
        throw std::invalid_argument("selection order must lie in 1..N");
      break;
    case PolicyKind::kOrderET:
      if (allowed_orders.empty())
        throw std::invalid_argument("allowed order set must not be empty");
      for (int j : allowed_orders)
        if (j < 1 || j > n_users) throw std::invalid_argument("allowed orders must lie in 1..N");
      break;
  }
}

std::vector<double> metric_mt(const SlotChannel& slot, const DualState& duals,
                              const LinkBudget& link) {
  std::vector<double> out(slot.gains.size());
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = rate_of(link.tx_power_w, slot.gains[n], link.noise_w[n]) -
             duals.nu * energy_of(link.tx_power_w, slot.gains[n], link.efficiency[n]);
  return out;
}

std::vector<double> metric_pf(const SlotChannel& slot, const DualState& duals,
                              const LinkBudget& link) {
  auto out = metric_mt(slot, duals, link);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] -= duals.gamma[n];
  return out;
}

std::vector<double> metric_et(const SlotChannel& slot, const DualState& duals,
                              const LinkBudget& link) {
  std::vector<double> out(slot.gains.size());
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = duals.theta[n] * rate_of(link.tx_power_w, slot.gains[n], link.noise_w[n]) -
             duals.nu * energy_of(link.tx_power_w, slot.gains[n], link.efficiency[n]);
  return out;
}

int argmax_lowest(std::span<const double> values) {
  int best = 0;
  for (std::size_t n = 1; n < values.size(); ++n)
    if (values[n] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(n);
  return best;
}

int user_at_order(std::span<const double> values, int j) {
  // Rank of n = 1 + #{k : v_k < v_n, or v_k == v_n and k < n}.
  const int n_users = static_cast<int>(values.size());
  for (int n = 0; n < n_users; ++n) {
    int rank = 1;
    for (int k = 0; k < n_users; ++k)
      if (values[k] < values[n] || (values[k] == values[n] && k < n)) ++rank;
    if (rank == j) return n;
  }
  throw std::invalid_argument("selection order out of range");
}

SlotDecision make_decision(const SlotChannel& slot, int selected, double tx_power_w,
                           const LinkBudget& link) {
  SlotDecision d;
  d.slot_index = slot.slot_index;
  d.selected = selected;
  d.tx_power_w = tx_power_w;
  d.rate = rate_of(tx_power_w, slot.gains[selected], link.noise_w[selected]);
  d.harvested.assign(slot.gains.size(), 0.0);
  for (std::size_t k = 0; k < slot.gains.size(); ++k)
    if (static_cast<int>(k) != selected)
      d.harvested[k] = energy_of(tx_power_w, slot.gains[k], link.efficiency[k]);
  return d;
}

SlotDecision select_optimal(const SlotChannel& slot, const PolicySpec& spec,
                            const LinkBudget& link) {
  if (!spec.is_optimal())
    throw std::invalid_argument("select_optimal requires an MT, PF or ET policy");
  spec.validate(static_cast<int>(slot.gains.size()));
  if (energy_limit(spec.duals) && spec.kind != PolicyKind::kPF) {
    std::vector<double> neg_energy(slot.gains.size());
    for (std::size_t n = 0; n < neg_energy.size(); ++n)
      neg_energy[n] = -energy_of(link.tx_power_w, slot.gains[n], link.efficiency[n]);
    return make_decision(slot, argmax_lowest(neg_energy), link.tx_power_w, link);
  }
  std::vector<double> metric;
  switch (spec.kind) {
    case PolicyKind::kMT: metric = metric_mt(slot, spec.duals, link); break;
    case PolicyKind::kPF: metric = metric_pf(slot, spec.duals, link); break;
    default: metric = metric_et(slot, spec.duals, link); break;
  }
  return make_decision(slot, argmax_lowest(metric), link.tx_power_w, link);
}

SlotDecision select_order_snr(const SlotChannel& slot, int j, const LinkBudget& link) {
  return make_decision(slot, user_at_order(slot.gains, j), link.tx_power_w, link);
}

SlotDecision select_order_nsnr(const SlotChannel& slot, const UserGeometry& geometry, int j,
                               const LinkBudget& link) {
  std::vector<double> normalized(slot.gains.size());
  for (std::size_t n = 0; n < normalized.size(); ++n)
    normalized[n] = slot.gains[n] / geometry.mean_gain[n];
  return make_decision(slot, user_at_order(normalized, j), link.tx_power_w, link);
}

namespace {

int order_et_pick(std::span<const double> normalized, std::span<const char> allowed_by_order,
                  const std::vector<double>& running_avg) {
  const int n_users = static_cast<int>(normalized.size());
  int best = -1;
  for (int n = 0; n < n_users; ++n) {
    int rank = 1;
    for (int k = 0; k < n_users; ++k)
      if (normalized[k] < normalized[n] || (normalized[k] == normalized[n] && k < n)) ++rank;
    if (!allowed_by_order[static_cast<std::size_t>(rank)]) continue;
    if (best < 0 || running_avg[n] < running_avg[best]) best = n;
  }
  return best;
}

void fold_running_average(OrderEtState& state, int selected, double rate) {
  const double i = static_cast<double>(++state.slots_seen);
  for (std::size_t n = 0; n < state.running_avg.size(); ++n) {
    const double served = static_cast<int>(n) == selected ? rate : 0.0;
    state.running_avg[n] = ((i - 1.0) * state.running_avg[n] + served) / i;
  }
}

}  // namespace

SlotDecision select_order_et(const SlotChannel& slot, const UserGeometry& geometry,
                             std::span<const int> allowed_orders, OrderEtState& state,
                             const LinkBudget& link) {
  const int n_users = static_cast<int>(slot.gains.size());
  if (allowed_orders.empty()) throw std::invalid_argument("allowed order set must not be empty");
  std::vector<char> mask(static_cast<std::size_t>(n_users) + 1, 0);
  for (int j : allowed_orders) {
    if (j < 1 || j > n_users) throw std::invalid_argument("allowed orders must lie in 1..N");
    mask[static_cast<std::size_t>(j)] = 1;
  }
  std::vector<double> normalized(slot.gains.size());
  for (std::size_t n = 0; n < normalized.size(); ++n)
    normalized[n] = slot.gains[n] / geometry.mean_gain[n];
  const int selected = order_et_pick(normalized, mask, state.running_avg);
  SlotDecision d = make_decision(slot, selected, link.tx_power_w, link);
  fold_running_average(state, selected, d.rate);
  return d;
}

SlotSelector::SlotSelector(const PolicySpec& spec, const LinkBudget& link,
                           const UserGeometry& geometry)
    : spec_(spec),
      tx_power_w_(link.tx_power_w),
      noise_w_(link.noise_w),
      energy_scale_(link.noise_w.size()),
      inv_mean_gain_(geometry.mean_gain.size()),
      scratch_(link.noise_w.size()),
      et_state_(link.n_users()) {
  const int n_users = link.n_users();
  if (geometry.n_users() != n_users)
    throw std::invalid_argument("geometry and link budget disagree on the user count");
  spec_.validate(n_users);
  for (int n = 0; n < n_users; ++n) {
    energy_scale_[n] = link.efficiency[n] * link.tx_power_w;
    inv_mean_gain_[n] = 1.0 / geometry.mean_gain[n];
  }
  if (spec_.kind == PolicyKind::kOrderET) {
    allowed_mask_.assign(static_cast<std::size_t>(n_users) + 1, 0);
    for (int j : spec_.allowed_orders) allowed_mask_[static_cast<std::size_t>(j)] = 1;
  }
}

int SlotSelector::select(std::span<const double> gains, std::span<double> rates) {
  const std::size_t n_users = gains.size();
  // Same expression order as rate_of / energy_of so that metric and
  // accounting paths agree bit for bit.
  for (std::size_t n = 0; n < n_users; ++n)
    rates[n] = std::log2(1.0 + tx_power_w_ * gains[n] / noise_w_[n]);
  const DualState& d = spec_.duals;
  switch (spec_.kind) {
    case PolicyKind::kMT:
    case PolicyKind::kET:
      if (energy_limit(d)) {
        for (std::size_t n = 0; n < n_users; ++n) scratch_[n] = -(energy_scale_[n] * gains[n]);
      } else if (spec_.kind == PolicyKind::kMT) {
        for (std::size_t n = 0; n < n_users; ++n)
          scratch_[n] = rates[n] - d.nu * (energy_scale_[n] * gains[n]);
      } else {
        for (std::size_t n = 0; n < n_users; ++n)
          scratch_[n] = d.theta[n] * rates[n] - d.nu * (energy_scale_[n] * gains[n]);
      }
      return argmax_lowest(scratch_);
    case PolicyKind::kPF:
      for (std::size_t n = 0; n < n_users; ++n)
        scratch_[n] = rates[n] - d.nu * (energy_scale_[n] * gains[n]) - d.gamma[n];
      return argmax_lowest(scratch_);
    case PolicyKind::kOrderSNR:
      return user_at_order(gains, spec_.order);
    case PolicyKind::kOrderNSNR:
      for (std::size_t n = 0; n < n_users; ++n) scratch_[n] = gains[n] * inv_mean_gain_[n];
      return user_at_order(scratch_, spec_.order);
    case PolicyKind::kOrderET: {
      for (std::size_t n = 0; n < n_users; ++n) scratch_[n] = gains[n] * inv_mean_gain_[n];
      const int selected = order_et_pick(scratch_, allowed_mask_, et_state_.running_avg);
      fold_running_average(et_state_, selected, rates[static_cast<std::size_t>(selected)]);
      return selected;
    }
  }
  return 0;
}

}  // namespace swipt
