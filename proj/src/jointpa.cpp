#include "swipt/jointpa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "swipt/errors.hpp"

namespace swipt {

void PowerConfig::validate() const {
  if (!(p_ave_w > 0.0)) throw std::invalid_argument("p_ave_w must be positive");
  if (!(p_ave_w <= p_max_w)) throw std::invalid_argument("p_ave_w must not exceed p_max_w");
  if (!std::isfinite(p_max_w)) throw std::invalid_argument("p_max_w must be finite");
  if (!(q_req_w >= 0.0)) throw std::invalid_argument("q_req_w must be non-negative");
}

double per_slot_power(double gain, double noise_w, double slope, double p_max_w) {
  if (slope >= 0.0) return p_max_w;
  const double level = 1.0 / (std::numbers::ln2 * -slope) - noise_w / gain;
  return std::clamp(level, 0.0, p_max_w);
}

double per_slot_objective(double power_w, double gain, double noise_w, double slope) {
  return std::log2(1.0 + power_w * gain / noise_w) + slope * power_w;
}

JointSelector::JointSelector(double nu, double mu, const PowerConfig& cfg, const LinkBudget& link)
    : nu_(nu),
      mu_(mu),
      p_max_(cfg.p_max_w),
      noise_w_(link.noise_w),
      efficiency_(link.efficiency),
      weighted_(link.noise_w.size()) {}

SlotOutcome JointSelector::select(std::span<const double> gains, std::span<double> powers) {
  const std::size_t n_users = gains.size();
  for (std::size_t k = 0; k < n_users; ++k) weighted_[k] = efficiency_[k] * gains[k];

  SlotOutcome best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < n_users; ++n) {
    // Summed directly rather than as total - own term: the near user can
    // dominate the total by many orders of magnitude.
    double others = 0.0;
    for (std::size_t k = 0; k < n_users; ++k)
      if (k != n) others += weighted_[k];
    const double slope = nu_ * others - mu_;
    const double p = per_slot_power(gains[n], noise_w_[n], slope, p_max_);
    if (!powers.empty()) powers[n] = p;
    const double rate = std::log2(1.0 + p * gains[n] / noise_w_[n]);
    const double value = rate + slope * p;
    if (value > best_value) {
      best_value = value;
      best.selected = static_cast<int>(n);
      best.tx_power_w = p;
      best.rate = rate;
      best.harvested = p * others;
    }
  }
  return best;
}

JointDecision select_joint(const SlotChannel& slot, double nu, double mu, const PowerConfig& cfg,
                           const LinkBudget& link) {
  JointSelector selector(nu, mu, cfg, link);
  const SlotOutcome o = selector.select(slot.gains);
  JointDecision d;
  d.slot_index = slot.slot_index;
  d.selected = o.selected;
  d.tx_power_w = o.tx_power_w;
  d.rate = o.rate;
  d.harvested.assign(slot.gains.size(), 0.0);
  for (std::size_t k = 0; k < slot.gains.size(); ++k)
    if (static_cast<int>(k) != o.selected)
      d.harvested[k] = energy_of(o.tx_power_w, slot.gains[k], link.efficiency[k]);
  return d;
}

PolicyAggregate evaluate_joint(double nu, double mu, const PowerConfig& cfg,
                               const UserGeometry& geometry, const SystemParams& params,
                               std::int64_t n_slots, const StreamKey& key) {
  if (n_slots < 1) throw std::invalid_argument("n_slots must be at least 1");
  const LinkBudget link = LinkBudget::from(params);
  return run_monte_carlo(geometry, key, n_slots, false, [&] {
    return [selector = JointSelector(nu, mu, cfg, link)](std::span<const double> gains) mutable {
      return selector.select(gains);
    };
  });
}

PolicyAggregate evaluate_joint_on_trace(double nu, double mu, const PowerConfig& cfg,
                                        const ChannelTrace& trace, const SystemParams& params) {
  JointSelector selector(nu, mu, cfg, LinkBudget::from(params));
  return run_on_trace(trace, [&](std::span<const double> gains) { return selector.select(gains); });
}

EnergyBound joint_max_harvest_estimate(const PowerConfig& cfg, const UserGeometry& geometry,
                                       const SystemParams& params, std::int64_t n_slots) {
  const LinkBudget link = LinkBudget::from(params);
  const ChannelTrace trace =
      generate_trace(geometry, StreamKey{params.rng_seed, StreamTag::kPilot, 2}, n_slots);
  const int n_users = trace.n_users();
  std::vector<double> best(static_cast<std::size_t>(trace.n_slots()));
  for (std::int64_t i = 0; i < trace.n_slots(); ++i) {
    const auto gains = trace.slot(i);
    double total = 0.0, lightest = std::numeric_limits<double>::infinity();
    for (int n = 0; n < n_users; ++n) {
      const double w = link.efficiency[n] * gains[n];
      total += w;
      lightest = std::min(lightest, w);
    }
    best[i] = total - lightest;
  }
  // Fractional knapsack: the budget buys full power in the best slots.
  std::sort(best.begin(), best.end(), std::greater<>());
  const double t = static_cast<double>(best.size());
  const double full_slots = t * cfg.p_ave_w / cfg.p_max_w;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < best.size(); ++i) {
    const double frac = std::clamp(full_slots - static_cast<double>(i), 0.0, 1.0);
    const double x = frac * cfg.p_max_w * best[i];
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / t;
  const double var = std::max(0.0, sum_sq / t - mean * mean);
  return {mean, std::sqrt(var / t)};
}

namespace {

double slack_residual(double value, double target, double multiplier, bool upper) {
  if (target <= 0.0) return 0.0;
  const double excess = upper ? value - target : target - value;
  if (multiplier > 0.0) return std::abs(value - target) / target;
  return std::max(0.0, excess) / target;
}

class Kesten {
 public:
  double next(double gradient) {
    if (has_previous_ && gradient * previous_ < 0.0) ++reversals_;
    previous_ = gradient;
    has_previous_ = true;
    return 1.0 / std::sqrt(1.0 + reversals_);
  }

 private:
  double previous_ = 0.0;
  bool has_previous_ = false;
  int reversals_ = 0;
};

}  // namespace

CalibrationReport calibrate_joint(const PowerConfig& cfg, const UserGeometry& geometry,
                                  const SystemParams& params, const CalibrationConfig& calib) {
  cfg.validate();
  calib.validate();
  params.validate();
  const double q_req = cfg.q_req_w;
  if (q_req > 0.0) {
    const EnergyBound bound = joint_max_harvest_estimate(
        cfg, geometry, params, calib.pilot_slots());
    if (q_req > bound.q_max + 3.0 * bound.stderr) {
      std::ostringstream msg;
      msg << "q_req " << q_req << " W exceeds the maximum achievable average harvest "
          << bound.q_max << " W under the power limits";
      throw InfeasibleTarget(msg.str());
    }
  }

  const LinkBudget link = LinkBudget::from(params);
  // Water-filling level at the budget, and the nu that lets the harvest
  // term of the slope balance it for a typical idle-user gain.
  const double mu_scale = 1.0 / (std::numbers::ln2 * cfg.p_ave_w);
  double idle_gain = 0.0;
  for (int n = 0; n < params.n_users; ++n) idle_gain += link.efficiency[n] * geometry.mean_gain[n];
  idle_gain *= static_cast<double>(params.n_users - 1) / params.n_users;
  const double nu_scale = mu_scale / idle_gain;

  CalibrationReport report;
  report.policy = "joint";
  report.q_req_w = q_req;
  DualState duals = DualState::zeros(params.n_users);
  Kesten nu_schedule, mu_schedule;
  int stable = 0;
  for (int m = 1; m <= calib.max_iters; ++m) {
    const StreamKey key{params.rng_seed, StreamTag::kCalibration, static_cast<std::uint64_t>(m)};
    const PolicyAggregate agg =
        evaluate_joint(duals.nu, duals.mu, cfg, geometry, params, calib.batch_slots, key);

    IterationRecord rec;
    rec.m = m;
    rec.nu = duals.nu;
    rec.mu = duals.mu;
    rec.q_sum = agg.q_sum;
    rec.r_sum = agg.r_sum;
    rec.p_used = agg.p_used;
    rec.energy_residual = slack_residual(agg.q_sum, q_req, duals.nu, false);
    rec.power_residual = slack_residual(agg.p_used, cfg.p_ave_w, duals.mu, true);
    rec.shares.resize(static_cast<std::size_t>(params.n_users));
    for (int n = 0; n < params.n_users; ++n) rec.shares[n] = agg.share(n);
    rec.user_rate = agg.user_rate;
    report.trace.push_back(rec);
    report.iterations = m;

    DualState next = duals;
    if (q_req > 0.0 || duals.nu > 0.0) {
      const double gap = q_req > 0.0 ? (q_req - agg.q_sum) / q_req : -1.0;
      next.nu = std::max(duals.nu + calib.step_nu * nu_schedule.next(gap) * nu_scale * gap, 0.0);
    }
    const double p_gap = (agg.p_used - cfg.p_ave_w) / cfg.p_ave_w;
    next.mu = std::max(duals.mu + calib.step_mu * mu_schedule.next(p_gap) * mu_scale * p_gap, 0.0);

    // The harvest of a power-adaptive schedule is heavy tailed, so the
    // residual bands are widened by two batch standard errors.
    const double q_band = calib.tol_feasibility + (q_req > 0.0 ? 2.0 * agg.stderr_q / q_req : 0.0);
    const double p_band = calib.tol_feasibility + 2.0 * agg.stderr_p / cfg.p_ave_w;
    const bool ok = rec.energy_residual <= q_band && rec.power_residual <= p_band &&
                    std::abs(next.nu - duals.nu) <= calib.tol_feasibility * nu_scale &&
                    std::abs(next.mu - duals.mu) <= calib.tol_feasibility * mu_scale;
    stable = ok ? stable + 1 : 0;
    if (stable >= calib.stable_iters) {
      report.converged = true;
      break;
    }
    duals = next;
  }
  report.duals = duals;
  if (!report.converged) {
    const IterationRecord& last = report.trace.back();
    std::ostringstream note;
    note << "no convergence after " << calib.max_iters << " iterations";
    if (last.energy_residual > calib.tol_feasibility)
      note << "; energy residual " << last.energy_residual;
    if (last.power_residual > calib.tol_feasibility) note << "; power residual " << last.power_residual;
    report.note = note.str();
  }
  return report;
}

namespace {

struct Bracket {
  double lo = 0.0;  // largest x seen infeasible (0 if feasible(0))
  double hi = 0.0;  // smallest x seen feasible
};

// Bisection for the smallest x >= 0 with feasible(x), assuming feasibility
// for large x. hi is infinite if no feasible x was found.
template <class Pred>
Bracket smallest_feasible(Pred&& feasible, double start) {
  if (feasible(0.0)) return {0.0, 0.0};
  Bracket b{0.0, start};
  while (!feasible(b.hi)) {
    b.lo = b.hi;
    b.hi *= 2.0;
    if (b.hi > 1e300) return {b.lo, std::numeric_limits<double>::infinity()};
  }
  for (int it = 0; it < 200 && b.hi - b.lo > 1e-13 * b.hi; ++it) {
    const double mid = 0.5 * (b.lo + b.hi);
    if (feasible(mid)) b.hi = mid;
    else b.lo = mid;
  }
  return b;
}

struct TraceTotals {
  double rate = 0.0, harvest = 0.0, power = 0.0;
};

// Per-slot choices at fixed duals. With a fixed schedule only the power of
// the scheduled user is optimized.
class TracePlanner {
 public:
  TracePlanner(const ChannelTrace& trace, const PowerConfig& cfg, const LinkBudget& link)
      : trace_(trace), cfg_(cfg), link_(link) {}

  void fix_schedule(std::vector<int> schedule) { schedule_ = std::move(schedule); }

  std::vector<SlotOutcome> plan(double nu, double mu,
                                std::vector<std::vector<double>>* candidates = nullptr) const {
    const int n_users = trace_.n_users();
    JointSelector selector(nu, mu, cfg_, link_);
    std::vector<SlotOutcome> out;
    std::vector<double> powers(static_cast<std::size_t>(n_users));
    for (std::int64_t i = 0; i < trace_.n_slots(); ++i) {
      const auto gains = trace_.slot(i);
      SlotOutcome o = selector.select(gains, powers);
      if (!schedule_.empty()) {
        const int n = schedule_[static_cast<std::size_t>(i)];
        double others = 0.0;
        for (int k = 0; k < n_users; ++k)
          if (k != n) others += link_.efficiency[k] * gains[k];
        o.selected = n;
        o.tx_power_w = powers[static_cast<std::size_t>(n)];
        o.rate = std::log2(1.0 + o.tx_power_w * gains[n] / link_.noise_w[n]);
        o.harvested = o.tx_power_w * others;
      }
      if (candidates) candidates->push_back(powers);
      out.push_back(o);
    }
    return out;
  }

  TraceTotals totals(double nu, double mu) const {
    TraceTotals t;
    for (const SlotOutcome& o : plan(nu, mu)) {
      t.rate += o.rate;
      t.harvest += o.harvested;
      t.power += o.tx_power_w;
    }
    return t;
  }

  // Smallest nu meeting the harvest target, each nu paired with the
  // smallest mu meeting the power budget.
  struct Duals {
    double nu = 0.0, mu = 0.0, nu_below = 0.0;
    bool feasible = false;
  };
  Duals solve(double mu_start, double nu_start) const {
    const double t = static_cast<double>(trace_.n_slots());
    auto mu_for = [&](double nu) {
      return smallest_feasible([&](double mu) { return totals(nu, mu).power <= t * cfg_.p_ave_w; },
                               mu_start)
          .hi;
    };
    const Bracket b = smallest_feasible(
        [&](double nu) { return totals(nu, mu_for(nu)).harvest >= t * cfg_.q_req_w; }, nu_start);
    Duals d;
    d.feasible = std::isfinite(b.hi);
    if (!d.feasible) return d;
    d.nu = b.hi;
    d.nu_below = b.lo;
    d.mu = mu_for(b.hi);
    return d;
  }

 private:
  const ChannelTrace& trace_;
  const PowerConfig& cfg_;
  const LinkBudget& link_;
  std::vector<int> schedule_;
};

}  // namespace

JointTraceSolution solve_joint_on_trace(const ChannelTrace& trace, const PowerConfig& cfg,
                                        const SystemParams& params) {
  cfg.validate();
  const LinkBudget link = LinkBudget::from(params);
  const double mu_start = 1.0 / (std::numbers::ln2 * cfg.p_ave_w);
  double idle = 0.0;
  for (std::int64_t i = 0; i < trace.n_slots(); ++i) {
    const auto gains = trace.slot(i);
    for (int n = 0; n < trace.n_users(); ++n) idle += link.efficiency[n] * gains[n];
  }
  idle /= static_cast<double>(trace.n_slots());
  const double nu_start = mu_start / std::max(idle, 1e-300);

  TracePlanner free_planner(trace, cfg, link);
  const TracePlanner::Duals free_duals = free_planner.solve(mu_start, nu_start);
  if (!free_duals.feasible) throw InfeasibleTarget("q_req exceeds what the trace can deliver");

  // Primal recovery: a selection switch at the critical nu makes the
  // harvest jump, so the schedules on both sides of it are re-solved with
  // the schedule held fixed, where harvest and power vary continuously.
  struct Candidate {
    TracePlanner planner;
    TracePlanner::Duals duals;
  };
  std::vector<Candidate> candidates{{free_planner, free_duals}};
  auto schedule_of = [&](double nu, double mu) {
    std::vector<int> schedule;
    for (const SlotOutcome& o : free_planner.plan(nu, mu)) schedule.push_back(o.selected);
    return schedule;
  };
  std::vector<std::vector<int>> schedules{schedule_of(free_duals.nu, free_duals.mu)};
  if (free_duals.nu > 0.0) {
    const double t = static_cast<double>(trace.n_slots());
    const double mu_below =
        smallest_feasible(
            [&](double mu) {
              return free_planner.totals(free_duals.nu_below, mu).power <= t * cfg.p_ave_w;
            },
            mu_start)
            .hi;
    schedules.push_back(schedule_of(free_duals.nu_below, mu_below));
  }
  for (auto& schedule : schedules) {
    TracePlanner fixed(trace, cfg, link);
    fixed.fix_schedule(schedule);
    const TracePlanner::Duals d = fixed.solve(mu_start, nu_start);
    if (d.feasible) candidates.push_back({fixed, d});
  }

  const Candidate* best = nullptr;
  double best_rate = -1.0;
  for (const Candidate& c : candidates) {
    const double rate = c.planner.totals(c.duals.nu, c.duals.mu).rate;
    if (rate > best_rate) {
      best_rate = rate;
      best = &c;
    }
  }

  JointTraceSolution sol;
  sol.nu = best->duals.nu;
  sol.mu = best->duals.mu;
  const std::vector<SlotOutcome> plan = best->planner.plan(sol.nu, sol.mu, &sol.candidates);
  for (const SlotOutcome& o : plan) {
    sol.schedule.push_back(o.selected);
    sol.powers.push_back(o.tx_power_w);
  }
  std::int64_t slot = 0;
  sol.aggregate = run_on_trace(trace, [&](std::span<const double>) { return plan[slot++]; });
  return sol;
}

std::vector<double> oracle_power_grid(double p_max_w, int grid_size) {
  if (grid_size < 1) throw std::invalid_argument("power grid needs at least one level");
  if (grid_size == 1) return {p_max_w};
  std::vector<double> grid{0.0};
  const int n_log = grid_size - 1;
  constexpr double kDecades = 3.0;
  for (int k = 0; k < n_log; ++k) {
    const double exponent = n_log == 1 ? 0.0 : -kDecades * (n_log - 1 - k) / (n_log - 1);
    grid.push_back(p_max_w * std::pow(10.0, exponent));
  }
  return grid;
}

namespace {

struct Option {
  int user;
  double power, rate, harvest;
};

struct Search {
  std::vector<std::vector<Option>> options;
  std::vector<double> rate_bound;     // suffix sums of per-slot max rate
  std::vector<double> harvest_bound;  // suffix sums of per-slot max harvest
  double power_budget = 0.0;
  double harvest_target = 0.0;
  double best_rate = -1.0;
  std::vector<int> pick, best_pick;

  void run(std::size_t slot, double rate, double power, double harvest) {
    if (power > power_budget) return;
    if (harvest + harvest_bound[slot] < harvest_target) return;
    if (rate + rate_bound[slot] <= best_rate) return;
    if (slot == options.size()) {
      best_rate = rate;
      best_pick = pick;
      return;
    }
    const auto& opts = options[slot];
    for (std::size_t o = 0; o < opts.size(); ++o) {
      pick[slot] = static_cast<int>(o);
      run(slot + 1, rate + opts[o].rate, power + opts[o].power, harvest + opts[o].harvest);
    }
  }
};

}  // namespace

OracleResult oracle_joint_exhaustive(const ChannelTrace& trace, const PowerConfig& cfg,
                                     const SystemParams& params, int grid_size,
                                     const std::vector<std::vector<double>>& extra) {
  cfg.validate();
  const LinkBudget link = LinkBudget::from(params);
  const auto t_slots = static_cast<std::size_t>(trace.n_slots());
  const int n_users = trace.n_users();
  const std::vector<double> grid = oracle_power_grid(cfg.p_max_w, grid_size);
  if (!extra.empty() && extra.size() != t_slots)
    throw std::invalid_argument("extra power candidates must list one entry per slot");

  Search search;
  search.options.resize(t_slots);
  double combinations = 1.0;
  for (std::size_t i = 0; i < t_slots; ++i) {
    std::vector<double> levels = grid;
    if (!extra.empty())
      for (double p : extra[i])
        if (p >= 0.0 && p <= cfg.p_max_w) levels.push_back(p);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    combinations *= static_cast<double>(levels.size()) * n_users;
    if (combinations > kOracleMaxCombinations) {
      std::ostringstream msg;
      msg << "oracle instance too large: more than " << kOracleMaxCombinations
          << " schedule/power combinations";
      throw InstanceTooLarge(msg.str());
    }
    const auto gains = trace.slot(static_cast<std::int64_t>(i));
    for (int n = 0; n < n_users; ++n) {
      for (double p : levels) {
        // Big-M form: the power user k harvests from is P_virtual_k =
        // (1 - q_k) * sum_j P'_j, capped by (1 - q_k) P_max.
        double harvest = 0.0;
        for (int k = 0; k < n_users; ++k) {
          const double p_virtual = k == n ? 0.0 : p;
          if (p_virtual > (k == n ? 0.0 : cfg.p_max_w) || p_virtual > p)
            throw std::logic_error("virtual power violates its big-M caps");
          harvest += p_virtual * link.efficiency[k] * gains[k];
        }
        search.options[i].push_back({n, p, rate_of(p, gains[n], link.noise_w[n]), harvest});
      }
    }
  }

  search.rate_bound.assign(t_slots + 1, 0.0);
  search.harvest_bound.assign(t_slots + 1, 0.0);
  for (std::size_t i = t_slots; i-- > 0;) {
    double r = 0.0, q = 0.0;
    for (const Option& o : search.options[i]) {
      r = std::max(r, o.rate);
      q = std::max(q, o.harvest);
    }
    search.rate_bound[i] = search.rate_bound[i + 1] + r;
    search.harvest_bound[i] = search.harvest_bound[i + 1] + q;
  }
  // Finite-trace constraints, with a relative slack of 1e-12 for
  // summation-order rounding.
  const double t = static_cast<double>(t_slots);
  search.power_budget = t * cfg.p_ave_w * (1.0 + 1e-12);
  search.harvest_target = t * cfg.q_req_w * (1.0 - 1e-12);
  search.pick.assign(t_slots, 0);
  search.run(0, 0.0, 0.0, 0.0);

  OracleResult result;
  result.combinations = static_cast<std::int64_t>(combinations);
  if (search.best_rate < 0.0) return result;
  result.feasible = true;
  for (std::size_t i = 0; i < t_slots; ++i) {
    const Option& o = search.options[i][static_cast<std::size_t>(search.best_pick[i])];
    result.schedule.push_back(o.user);
    result.powers.push_back(o.power);
    result.r_sum += o.rate;
    result.q_sum += o.harvest;
    result.p_used += o.power;
  }
  result.r_sum /= t;
  result.q_sum /= t;
  result.p_used /= t;
  return result;
}

}  // namespace swipt
