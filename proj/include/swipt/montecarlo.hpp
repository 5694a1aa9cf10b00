#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "swipt/env.hpp"
#include "swipt/parallel.hpp"

namespace swipt {

/// What one slot contributed: the served user, the radiated power, the
/// served rate and the total power harvested by the idle users.
struct SlotOutcome {
  int selected = 0;
  double tx_power_w = 0.0;
  double rate = 0.0;
  double harvested = 0.0;
};

/// Time averages of a policy over a trace. Standard errors come from the
/// spread of per-block means (BlockLayout blocks).
struct PolicyAggregate {
  std::int64_t n_slots = 0;
  double r_sum = 0.0;   // bits/channel-use
  double q_sum = 0.0;   // W
  double p_used = 0.0;  // W
  std::vector<std::int64_t> access;
  std::vector<double> user_rate;
  double stderr_r = 0.0;
  double stderr_q = 0.0;
  double stderr_p = 0.0;

  double share(int user) const {
    return n_slots == 0 ? 0.0 : static_cast<double>(access[user]) / static_cast<double>(n_slots);
  }
};

namespace detail {

struct BlockTotals {
  std::int64_t slots = 0;
  double rate = 0.0;
  double harvested = 0.0;
  double power = 0.0;
  std::vector<std::int64_t> access;
  std::vector<double> user_rate;
};

template <class Kernel>
void run_block(Kernel& kernel, std::span<const double> gains, int n_users, BlockTotals& out) {
  out.access.assign(static_cast<std::size_t>(n_users), 0);
  out.user_rate.assign(static_cast<std::size_t>(n_users), 0.0);
  const std::int64_t count = static_cast<std::int64_t>(gains.size()) / n_users;
  for (std::int64_t s = 0; s < count; ++s) {
    const SlotOutcome o = kernel(gains.subspan(static_cast<std::size_t>(s * n_users),
                                               static_cast<std::size_t>(n_users)));
    out.rate += o.rate;
    out.harvested += o.harvested;
    out.power += o.tx_power_w;
    ++out.access[static_cast<std::size_t>(o.selected)];
    out.user_rate[static_cast<std::size_t>(o.selected)] += o.rate;
  }
  out.slots = count;
}

inline double block_stderr(const std::vector<BlockTotals>& blocks, double BlockTotals::*field) {
  const std::size_t b = blocks.size();
  if (b < 2) return 0.0;
  double mean = 0.0;
  for (const auto& blk : blocks) mean += blk.*field / static_cast<double>(blk.slots);
  mean /= static_cast<double>(b);
  double ss = 0.0;
  for (const auto& blk : blocks) {
    const double d = blk.*field / static_cast<double>(blk.slots) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
}

inline PolicyAggregate merge(const std::vector<BlockTotals>& blocks, int n_users) {
  PolicyAggregate agg;
  agg.access.assign(static_cast<std::size_t>(n_users), 0);
  agg.user_rate.assign(static_cast<std::size_t>(n_users), 0.0);
  double rate = 0.0, harvested = 0.0, power = 0.0;
  for (const auto& blk : blocks) {
    agg.n_slots += blk.slots;
    rate += blk.rate;
    harvested += blk.harvested;
    power += blk.power;
    for (int n = 0; n < n_users; ++n) {
      agg.access[n] += blk.access[n];
      agg.user_rate[n] += blk.user_rate[n];
    }
  }
  const double t = static_cast<double>(agg.n_slots);
  agg.r_sum = rate / t;
  agg.q_sum = harvested / t;
  agg.p_used = power / t;
  for (auto& c : agg.user_rate) c /= t;
  agg.stderr_r = block_stderr(blocks, &BlockTotals::rate);
  agg.stderr_q = block_stderr(blocks, &BlockTotals::harvested);
  agg.stderr_p = block_stderr(blocks, &BlockTotals::power);
  return agg;
}

}  // namespace detail

/// Draws `n_slots` slots from stream `key` and runs a slot kernel over them.
/// `make_kernel()` returns a callable SlotOutcome(std::span<const double>).
/// Stateless kernels run one instance per block, possibly in parallel;
/// stateful ones (`sequential`) see every block in order. Either way the
/// result depends only on (geometry, key, n_slots).
template <class MakeKernel>
PolicyAggregate run_monte_carlo(const UserGeometry& geometry, const StreamKey& key,
                                std::int64_t n_slots, bool sequential, MakeKernel&& make_kernel) {
  const BlockLayout layout(n_slots);
  const int n_users = geometry.n_users();
  std::vector<detail::BlockTotals> blocks(static_cast<std::size_t>(layout.n_blocks));
  if (sequential) {
    auto kernel = make_kernel();
    std::vector<double> gains;
    for (std::int64_t b = 0; b < layout.n_blocks; ++b) {
      draw_block(geometry, key, layout, b, gains);
      detail::run_block(kernel, gains, n_users, blocks[static_cast<std::size_t>(b)]);
    }
  } else {
    parallel_for(blocks.size(), [&](std::size_t b) {
      auto kernel = make_kernel();
      std::vector<double> gains;
      draw_block(geometry, key, layout, static_cast<std::int64_t>(b), gains);
      detail::run_block(kernel, gains, n_users, blocks[b]);
    });
  }
  return detail::merge(blocks, n_users);
}

/// Same accounting over an already materialized trace, in slot order.
template <class Kernel>
PolicyAggregate run_on_trace(const ChannelTrace& trace, Kernel&& kernel) {
  const BlockLayout layout(trace.n_slots());
  const int n_users = trace.n_users();
  std::vector<detail::BlockTotals> blocks(static_cast<std::size_t>(layout.n_blocks));
  for (std::int64_t b = 0; b < layout.n_blocks; ++b) {
    const auto first = static_cast<std::size_t>(layout.begin(b) * n_users);
    const auto len = static_cast<std::size_t>((layout.end(b) - layout.begin(b)) * n_users);
    detail::run_block(kernel, trace.data().subspan(first, len), n_users,
                      blocks[static_cast<std::size_t>(b)]);
  }
  return detail::merge(blocks, n_users);
}

}  // namespace swipt
