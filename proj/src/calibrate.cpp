#include "swipt/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "swipt/errors.hpp"

namespace swipt {

void CalibrationConfig::validate() const {
  if (batch_slots < 100) throw std::invalid_argument("batch_slots must be at least 100");
  if (!(step_nu > 0.0 && step_gamma > 0.0 && step_theta > 0.0 && step_mu > 0.0))
    throw std::invalid_argument("step sizes must be positive");
  if (!(tol_feasibility > 0.0) || !(tol_fairness > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(q_req_w >= 0.0)) throw std::invalid_argument("q_req_w must be non-negative");
  if (stable_iters < 1) throw std::invalid_argument("stable_iters must be at least 1");
}

double share_residual(const PolicyAggregate& agg) {
  const double target = 1.0 / static_cast<double>(agg.access.size());
  double worst = 0.0;
  for (std::size_t n = 0; n < agg.access.size(); ++n)
    worst = std::max(worst, std::abs(agg.share(static_cast<int>(n)) - target));
  return worst;
}

double throughput_spread(const std::vector<double>& user_rate) {
  const auto [lo, hi] = std::minmax_element(user_rate.begin(), user_rate.end());
  const double mean =
      std::accumulate(user_rate.begin(), user_rate.end(), 0.0) / static_cast<double>(user_rate.size());
  return mean > 0.0 ? (*hi - *lo) / mean : std::numeric_limits<double>::infinity();
}

namespace {

auto fixed_power_kernel(const PolicySpec& spec, const LinkBudget& link,
                        const UserGeometry& geometry) {
  return [selector = SlotSelector(spec, link, geometry), link,
          rates = std::vector<double>(link.noise_w.size())](
             std::span<const double> gains) mutable {
    const int n = selector.select(gains, rates);
    SlotOutcome o;
    o.selected = n;
    o.tx_power_w = link.tx_power_w;
    o.rate = rates[static_cast<std::size_t>(n)];
    for (std::size_t k = 0; k < gains.size(); ++k)
      if (static_cast<int>(k) != n) o.harvested += energy_of(link.tx_power_w, gains[k], link.efficiency[k]);
    return o;
  };
}

// Residual used for the convergence test: complementary slackness when
// nu > 0, plain feasibility when nu == 0.
double energy_residual(double q_sum, double q_req, double nu) {
  if (q_req <= 0.0) return 0.0;
  if (nu > 0.0) return std::abs(q_sum - q_req) / q_req;
  return std::max(0.0, q_req - q_sum) / q_req;
}

void check_feasible(const CalibrationConfig& cfg, const UserGeometry& geometry,
                    const SystemParams& params) {
  if (cfg.q_req_w <= 0.0) return;
  const EnergyBound bound =
      max_harvest_estimate(geometry, params, cfg.pilot_slots());
  if (cfg.q_req_w > bound.q_max + 3.0 * bound.stderr) {
    std::ostringstream msg;
    msg << "q_req " << cfg.q_req_w << " W exceeds the maximum achievable average harvest "
        << bound.q_max << " W";
    throw InfeasibleTarget(msg.str());
  }
}

// Kesten's rule: a multiplier's step shrinks as 1/sqrt(1 + k), where k
// counts iterations whose gradient turned against the previous one.
class KestenSchedule {
 public:
  double next(std::span<const double> gradient) {
    if (!previous_.empty()) {
      double dot = 0.0;
      for (std::size_t i = 0; i < gradient.size(); ++i) dot += gradient[i] * previous_[i];
      if (dot < 0.0) ++reversals_;
    }
    previous_.assign(gradient.begin(), gradient.end());
    return 1.0 / std::sqrt(1.0 + reversals_);
  }

 private:
  std::vector<double> previous_;
  int reversals_ = 0;
};

enum class Family { kMT, kPF, kET };

CalibrationReport run_calibration(Family family, const CalibrationConfig& cfg,
                                  const UserGeometry& geometry, const SystemParams& params) {
  cfg.validate();
  params.validate();
  check_feasible(cfg, geometry, params);

  const int n_users = params.n_users;
  const double inv_n = 1.0 / n_users;
  const DualScales scales = pilot_scales(geometry, params, std::min<std::int64_t>(cfg.batch_slots, 20000));
  // theta ~ 1/N scales the rate term of the ET metric down by N.
  const double nu_scale = family == Family::kET ? scales.nu * inv_n : scales.nu;
  const double q_req = cfg.q_req_w;

  CalibrationReport report;
  report.policy = family == Family::kMT ? "mt" : family == Family::kPF ? "pf" : "et";
  report.q_req_w = q_req;
  DualState duals = DualState::zeros(n_users);

  int stable = 0;
  KestenSchedule nu_schedule, gamma_schedule, theta_schedule;
  std::vector<double> gradient(static_cast<std::size_t>(n_users));
  for (int m = 1; m <= cfg.max_iters; ++m) {
    PolicySpec spec;
    spec.kind = family == Family::kMT ? PolicyKind::kMT
                : family == Family::kPF ? PolicyKind::kPF
                                        : PolicyKind::kET;
    spec.duals = duals;
    const StreamKey key{params.rng_seed, StreamTag::kCalibration, static_cast<std::uint64_t>(m)};
    const PolicyAggregate agg = evaluate_policy(spec, geometry, params, cfg.batch_slots, key);

    IterationRecord rec;
    rec.m = m;
    rec.nu = duals.nu;
    rec.q_sum = agg.q_sum;
    rec.r_sum = agg.r_sum;
    rec.p_used = agg.p_used;
    rec.energy_residual = energy_residual(agg.q_sum, q_req, duals.nu);
    rec.share_residual = share_residual(agg);
    rec.throughput_spread = throughput_spread(agg.user_rate);
    rec.shares.resize(static_cast<std::size_t>(n_users));
    for (int n = 0; n < n_users; ++n) rec.shares[n] = agg.share(n);
    rec.user_rate = agg.user_rate;
    report.trace.push_back(rec);
    report.iterations = m;

    DualState next = duals;
    if (q_req > 0.0 || duals.nu > 0.0) {
      const double gap = q_req - agg.q_sum;
      const double step = nu_schedule.next(std::span<const double>(&gap, 1));
      const double denom = q_req > 0.0 ? q_req : scales.energy;
      next.nu = std::max(duals.nu + cfg.step_nu * step * nu_scale * gap / denom, 0.0);
    }
    if (family == Family::kPF) {
      for (int n = 0; n < n_users; ++n) gradient[n] = n_users * (agg.share(n) - inv_n);
      const double step = gamma_schedule.next(gradient);
      for (int n = 0; n < n_users; ++n)
        next.gamma[n] += cfg.step_gamma * step * scales.rate * gradient[n];
    }
    if (family == Family::kET) {
      const double r = *std::min_element(agg.user_rate.begin(), agg.user_rate.end());
      const double mean = std::accumulate(agg.user_rate.begin(), agg.user_rate.end(), 0.0) * inv_n;
      const double scale = mean > 0.0 ? mean : scales.rate;
      // Step taken in log(theta): the additive clipped step can pin a
      // strong user's weight at 0, which is absorbing (never scheduled,
      // so its throughput equals r and its gradient vanishes).
      // Normalization removes the common component, so reversals are
      // judged on the centered gradient.
      for (int n = 0; n < n_users; ++n) gradient[n] = (r - agg.user_rate[n]) / scale;
      const double g_mean = std::accumulate(gradient.begin(), gradient.end(), 0.0) * inv_n;
      std::vector<double> centered(gradient);
      for (auto& g : centered) g -= g_mean;
      const double step = theta_schedule.next(centered);
      for (int n = 0; n < n_users; ++n)
        next.theta[n] = duals.theta[n] * std::exp(cfg.step_theta * step * gradient[n]);
      const double total = std::accumulate(next.theta.begin(), next.theta.end(), 0.0);
      for (auto& t : next.theta) t = std::clamp(t / total, 0.0, 1.0);
    }

    bool ok = rec.energy_residual <= cfg.tol_feasibility &&
              std::abs(next.nu - duals.nu) <= cfg.tol_feasibility * nu_scale;
    if (family == Family::kPF) ok = ok && rec.share_residual <= cfg.tol_feasibility;
    if (family == Family::kET) ok = ok && rec.throughput_spread <= cfg.tol_fairness;
    stable = ok ? stable + 1 : 0;
    if (stable >= cfg.stable_iters) {
      report.converged = true;
      report.duals = duals;
      break;
    }
    duals = std::move(next);
  }

  if (!report.converged) {
    report.duals = duals;
    const IterationRecord& last = report.trace.back();
    std::ostringstream note;
    note << "no convergence after " << cfg.max_iters << " iterations";
    if (last.energy_residual > cfg.tol_feasibility) note << "; energy residual " << last.energy_residual;
    if (family == Family::kPF && last.share_residual > cfg.tol_feasibility)
      note << "; access shares off by " << last.share_residual;
    if (family == Family::kET && last.throughput_spread > cfg.tol_fairness)
      note << "; throughput spread " << last.throughput_spread << " not equalized";
    report.note = note.str();
  }
  return report;
}

}  // namespace

DualScales pilot_scales(const UserGeometry& geometry, const SystemParams& params,
                        std::int64_t n_slots) {
  const LinkBudget link = LinkBudget::from(params);
  const ChannelTrace trace =
      generate_trace(geometry, StreamKey{params.rng_seed, StreamTag::kPilot, 0}, n_slots);
  double rate = 0.0, energy = 0.0;
  for (std::int64_t i = 0; i < trace.n_slots(); ++i) {
    const auto gains = trace.slot(i);
    for (int n = 0; n < trace.n_users(); ++n) {
      rate += rate_of(link.tx_power_w, gains[n], link.noise_w[n]);
      energy += energy_of(link.tx_power_w, gains[n], link.efficiency[n]);
    }
  }
  const double count = static_cast<double>(trace.n_slots()) * trace.n_users();
  DualScales s;
  s.rate = rate / count;
  s.energy = energy / count;
  s.nu = s.energy > 0.0 ? s.rate / s.energy : 1.0;
  return s;
}

PolicyAggregate evaluate_policy(const PolicySpec& spec, const UserGeometry& geometry,
                                const SystemParams& params, std::int64_t n_slots,
                                const StreamKey& key) {
  if (n_slots < 1) throw std::invalid_argument("n_slots must be at least 1");
  const LinkBudget link = LinkBudget::from(params);
  spec.validate(params.n_users);
  return run_monte_carlo(geometry, key, n_slots, spec.kind == PolicyKind::kOrderET,
                         [&] { return fixed_power_kernel(spec, link, geometry); });
}

PolicyAggregate evaluate_policy(const PolicySpec& spec, const UserGeometry& geometry,
                                const SystemParams& params, std::int64_t n_slots) {
  return evaluate_policy(spec, geometry, params, n_slots, evaluation_stream(params));
}

PolicyAggregate evaluate_on_trace(const PolicySpec& spec, const ChannelTrace& trace,
                                  const UserGeometry& geometry, const SystemParams& params) {
  const LinkBudget link = LinkBudget::from(params);
  return run_on_trace(trace, fixed_power_kernel(spec, link, geometry));
}

std::vector<int> selections_on_trace(const PolicySpec& spec, const ChannelTrace& trace,
                                     const UserGeometry& geometry, const SystemParams& params) {
  const LinkBudget link = LinkBudget::from(params);
  SlotSelector selector(spec, link, geometry);
  std::vector<double> rates(static_cast<std::size_t>(trace.n_users()));
  std::vector<int> out(static_cast<std::size_t>(trace.n_slots()));
  for (std::int64_t i = 0; i < trace.n_slots(); ++i) out[i] = selector.select(trace.slot(i), rates);
  return out;
}

EnergyBound max_harvest_estimate(const UserGeometry& geometry, const SystemParams& params,
                                 std::int64_t n_slots) {
  const PolicySpec limit = PolicySpec::mt(std::numeric_limits<double>::infinity(), params.n_users);
  const PolicyAggregate agg = evaluate_policy(limit, geometry, params, n_slots,
                                              StreamKey{params.rng_seed, StreamTag::kPilot, 1});
  return {agg.q_sum, agg.stderr_q};
}

CalibrationReport calibrate_mt(const CalibrationConfig& cfg, const UserGeometry& geometry,
                               const SystemParams& params) {
  return run_calibration(Family::kMT, cfg, geometry, params);
}

CalibrationReport calibrate_pf(const CalibrationConfig& cfg, const UserGeometry& geometry,
                               const SystemParams& params) {
  return run_calibration(Family::kPF, cfg, geometry, params);
}

CalibrationReport calibrate_et(const CalibrationConfig& cfg, const UserGeometry& geometry,
                               const SystemParams& params) {
  return run_calibration(Family::kET, cfg, geometry, params);
}

CalibrationReport calibrate(PolicyKind kind, const CalibrationConfig& cfg,
                            const UserGeometry& geometry, const SystemParams& params) {
  switch (kind) {
    case PolicyKind::kMT: return calibrate_mt(cfg, geometry, params);
    case PolicyKind::kPF: return calibrate_pf(cfg, geometry, params);
    case PolicyKind::kET: return calibrate_et(cfg, geometry, params);
    default: throw std::invalid_argument("only MT, PF and ET policies are calibrated");
  }
}

PolicySpec policy_from_report(PolicyKind kind, const CalibrationReport& report) {
  PolicySpec spec;
  spec.kind = kind;
  spec.duals = report.duals;
  return spec;
}

TraceNuSolution bisect_nu_on_trace(const ChannelTrace& trace, const UserGeometry& geometry,
                                   const SystemParams& params, double q_req_w) {
  const int n = params.n_users;
  auto at = [&](double nu) { return evaluate_on_trace(PolicySpec::mt(nu, n), trace, geometry, params); };

  TraceNuSolution sol{0.0, at(0.0)};
  if (sol.aggregate.q_sum >= q_req_w) return sol;
  const PolicyAggregate limit = at(std::numeric_limits<double>::infinity());
  if (limit.q_sum < q_req_w) throw InfeasibleTarget("q_req exceeds the trace's maximum harvest");

  double lo = 0.0;
  double hi = 1.0;
  PolicyAggregate hi_agg = at(hi);
  while (hi_agg.q_sum < q_req_w) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return {std::numeric_limits<double>::infinity(), limit};
    hi_agg = at(hi);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    PolicyAggregate mid_agg = at(mid);
    if (mid_agg.q_sum >= q_req_w) {
      hi = mid;
      hi_agg = std::move(mid_agg);
    } else {
      lo = mid;
    }
  }
  return {hi, hi_agg};
}

}  // namespace swipt
