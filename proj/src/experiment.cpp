#include "swipt/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "swipt/errors.hpp"

namespace swipt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative offset of the levels placed on either side of a baseline's harvest.
constexpr double kBaselineOffset = 0.02;
// Quarter-decade nu steps past the largest calibrated nu (four decades).
constexpr int kLadderSteps = 16;

struct Held {
  double r = 0.0, q = 0.0, p = 0.0, se_r = 0.0, se_q = 0.0, se_p = 0.0;
  // Worst over repetitions.
  double share_residual = 0.0, spread = 0.0;
};

// Pools `reps` held-out evaluations (stream index r) into one estimate.
template <class Eval>
Held held_out(int reps, Eval&& eval) {
  Held h;
  for (int r = 0; r < reps; ++r) {
    const PolicyAggregate a = eval(static_cast<std::uint64_t>(r));
    h.r += a.r_sum;
    h.q += a.q_sum;
    h.p += a.p_used;
    h.se_r += a.stderr_r * a.stderr_r;
    h.se_q += a.stderr_q * a.stderr_q;
    h.se_p += a.stderr_p * a.stderr_p;
    h.share_residual = std::max(h.share_residual, swipt::share_residual(a));
    h.spread = std::max(h.spread, throughput_spread(a.user_rate));
  }
  h.r /= reps;
  h.q /= reps;
  h.p /= reps;
  h.se_r = std::sqrt(h.se_r) / reps;
  h.se_q = std::sqrt(h.se_q) / reps;
  h.se_p = std::sqrt(h.se_p) / reps;
  return h;
}

void fill(REPoint& pt, const Held& h) {
  pt.q_sum_w = h.q;
  pt.r_sum_bpcu = h.r;
  pt.p_used_w = h.p;
  pt.stderr_q = h.se_q;
  pt.stderr_r = h.se_r;
}

PolicyKind kind_of(const std::string& policy) { return parse_policy_kind(policy); }

bool resolved(const REPoint& p) { return !p.skipped; }

class CurveRunner {
 public:
  CurveRunner(const SweepPlan& plan, const SystemParams& params, const UserGeometry& geometry,
              const CalibrationConfig& calib, const PowerConfig& power, SweepResult& out)
      : plan_(plan), params_(params), geometry_(geometry), calib_(calib), power_(power), out_(out) {}

  // Calibrates one level and evaluates the result held-out.
  REPoint level(const std::string& policy, double q_req) {
    REPoint pt;
    pt.policy = policy;
    pt.q_req_w = q_req;
    CalibrationReport report;
    try {
      if (policy == "joint") {
        PowerConfig pw = power_;
        pw.q_req_w = q_req;
        report = calibrate_joint(pw, geometry_, params_, calib_);
      } else {
        CalibrationConfig c = calib_;
        c.q_req_w = q_req;
        report = calibrate(kind_of(policy), c, geometry_, params_);
      }
    } catch (const InfeasibleTarget& e) {
      pt.converged = false;
      pt.skipped = true;
      pt.note = std::string("infeasible: ") + e.what();
      pt.q_sum_w = pt.r_sum_bpcu = pt.p_used_w = pt.nu = pt.mu = kNaN;
      pt.stderr_q = pt.stderr_r = 0.0;
      return pt;
    }
    pt.nu = report.duals.nu;
    pt.mu = report.duals.mu;
    pt.converged = report.converged;
    pt.skipped = !report.converged;
    pt.note = report.note;
    const Held h = held_out(plan_.repetitions, [&](std::uint64_t r) {
      const StreamKey key = evaluation_stream(params_, r);
      if (policy == "joint")
        return evaluate_joint(report.duals.nu, report.duals.mu, power_, geometry_, params_,
                              plan_.eval_slots, key);
      return evaluate_policy(policy_from_report(kind_of(policy), report), geometry_, params_,
                             plan_.eval_slots, key);
    });
    fill(pt, h);
    // A metric policy that meets its other constraints is optimal for the
    // harvest it actually achieves, so only the energy target was missed.
    if (!report.converged && side_constraints_hold(policy, h)) {
      pt.skipped = false;
      pt.note += "; kept at achieved harvest";
    }
    out_.reports.push_back(std::move(report));
    return pt;
  }

  bool side_constraints_hold(const std::string& policy, const Held& h) const {
    if (policy == "pf") return h.share_residual <= calib_.tol_feasibility;
    if (policy == "et") return h.spread <= calib_.tol_fairness;
    if (policy == "joint")
      return h.p <= power_.p_ave_w * (1.0 + calib_.tol_feasibility) + 2.0 * h.se_p;
    return true;
  }

  REPoint energy_limit() {
    REPoint pt;
    pt.policy = "mt";
    pt.nu = kInf;
    pt.note = "energy limit (nu = inf)";
    const PolicySpec spec = PolicySpec::mt(kInf, params_.n_users);
    fill(pt, held_out(plan_.repetitions, [&](std::uint64_t r) {
           return evaluate_policy(spec, geometry_, params_, plan_.eval_slots,
                                  evaluation_stream(params_, r));
         }));
    pt.q_req_w = pt.q_sum_w;
    return pt;
  }

  // Near the energy limit the harvest barely moves with nu, so targets
  // there cannot be calibrated. Every MT policy is optimal for the harvest
  // it achieves, so fixed-nu points beyond the largest calibrated nu fill
  // in the curve up to the limit.
  void ladder(std::vector<REPoint>& pts) {
    double nu_max = 0.0;
    for (const REPoint& p : pts)
      if (resolved(p) && std::isfinite(p.nu)) nu_max = std::max(nu_max, p.nu);
    if (!(nu_max > 0.0)) return;
    for (int k = 1; k <= kLadderSteps; ++k) {
      REPoint pt;
      pt.policy = "mt";
      pt.nu = nu_max * std::pow(10.0, k / 4.0);
      pt.q_req_w = kNaN;
      pt.note = "fixed nu toward the energy limit";
      const PolicySpec spec = PolicySpec::mt(pt.nu, params_.n_users);
      fill(pt, held_out(plan_.repetitions, [&](std::uint64_t r) {
             return evaluate_policy(spec, geometry_, params_, plan_.eval_slots,
                                    evaluation_stream(params_, r));
           }));
      pts.push_back(pt);
    }
  }

  std::vector<double> default_levels(const std::string& policy, double q_lo,
                                     const std::vector<REPoint>& baseline) {
    const std::int64_t pilot = calib_.pilot_slots();
    const double q_max = policy == "joint"
                             ? joint_max_harvest_estimate(power_, geometry_, params_, pilot).q_max
                             : max_harvest_estimate(geometry_, params_, pilot).q_max;
    const double top = plan_.grid_top_fraction * q_max;
    std::vector<double> levels;
    if (q_lo > 0.0 && top > q_lo) {
      const int n = plan_.grid_points - 1;
      for (int k = 1; k <= n; ++k) levels.push_back(q_lo * std::pow(top / q_lo, double(k) / n));
    }
    // Bracket every baseline harvest from both sides so the curve is
    // interpolated locally there; the upper level stays below the maximum.
    for (const REPoint& b : baseline) {
      const double below = b.q_sum_w * (1.0 - kBaselineOffset);
      const double above = std::min(b.q_sum_w * (1.0 + kBaselineOffset),
                                    b.q_sum_w + 0.5 * (q_max - b.q_sum_w));
      if (below > q_lo) levels.push_back(below);
      if (above > q_lo && b.q_sum_w < q_max) levels.push_back(above);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    return levels;
  }

  void curve(const std::string& policy, const std::vector<REPoint>& baseline) {
    std::vector<REPoint> pts;
    std::vector<double> levels;
    if (!plan_.q_grid_w.empty()) {
      levels = plan_.q_grid_w;
    } else {
      pts.push_back(level(policy, 0.0));
      const double q_lo = pts.back().q_sum_w;
      levels = default_levels(policy, q_lo, baseline);
    }
    for (double q : levels) pts.push_back(level(policy, q));
    if (policy == "mt") {
      ladder(pts);
      pts.push_back(energy_limit());
    }
    std::stable_sort(pts.begin(), pts.end(), [](const REPoint& a, const REPoint& b) {
      // Skipped points without a measurement go last, by target.
      const bool am = std::isnan(a.q_sum_w), bm = std::isnan(b.q_sum_w);
      if (am != bm) return bm;
      return am ? a.q_req_w < b.q_req_w : a.q_sum_w < b.q_sum_w;
    });
    out_.points.insert(out_.points.end(), pts.begin(), pts.end());
  }

 private:
  const SweepPlan& plan_;
  const SystemParams& params_;
  const UserGeometry& geometry_;
  const CalibrationConfig& calib_;
  const PowerConfig& power_;
  SweepResult& out_;
};

}  // namespace

void SweepPlan::validate() const {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (eval_slots < 1) throw std::invalid_argument("eval_slots must be at least 1");
  if (grid_points < 1) throw std::invalid_argument("grid_points must be at least 1");
  if (!(grid_top_fraction > 0.0 && grid_top_fraction <= 1.0))
    throw std::invalid_argument("grid_top_fraction must lie in (0, 1]");
  for (std::size_t i = 0; i < q_grid_w.size(); ++i) {
    if (!(q_grid_w[i] >= 0.0)) throw std::invalid_argument("q_grid_w levels must be non-negative");
    if (i > 0 && !(q_grid_w[i] > q_grid_w[i - 1]))
      throw std::invalid_argument("q_grid_w must be strictly ascending");
  }
  for (const auto& p : policies)
    if (p != "joint") parse_policy_kind(p);
}

bool is_optimal_policy(const std::string& policy) {
  return policy == "mt" || policy == "pf" || policy == "et" || policy == "joint";
}

std::string baseline_of(const std::string& policy) {
  if (policy == "mt") return "order_snr";
  if (policy == "pf") return "order_nsnr";
  if (policy == "et") return "order_et";
  return "";
}

std::vector<REPoint> baseline_points(const std::string& baseline, const UserGeometry& geometry,
                                     const SystemParams& params, const SweepPlan& plan) {
  const int n = params.n_users;
  const PolicyKind kind = parse_policy_kind(baseline);
  std::vector<REPoint> pts;
  for (int j = 1; j <= n; ++j) {
    PolicySpec spec;
    if (kind == PolicyKind::kOrderSNR) {
      spec = PolicySpec::order_snr(j);
    } else if (kind == PolicyKind::kOrderNSNR) {
      spec = PolicySpec::order_nsnr(j);
    } else if (kind == PolicyKind::kOrderET) {
      // Every order but j: with two or more allowed orders the
      // minimum-throughput rule equalizes throughput.
      std::vector<int> allowed;
      for (int o = 1; o <= n; ++o)
        if (o != j) allowed.push_back(o);
      spec = PolicySpec::order_et(std::move(allowed));
    } else {
      throw std::invalid_argument("'" + baseline + "' is not an order-based policy");
    }
    REPoint pt;
    pt.policy = baseline;
    pt.order = j;
    pt.q_req_w = pt.nu = pt.mu = kNaN;
    fill(pt, held_out(plan.repetitions, [&](std::uint64_t r) {
           return evaluate_policy(spec, geometry, params, plan.eval_slots,
                                  evaluation_stream(params, r));
         }));
    pts.push_back(pt);
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const REPoint& a, const REPoint& b) { return a.q_sum_w < b.q_sum_w; });
  return pts;
}

SweepResult sweep_re_curve(const SweepPlan& plan, const SystemParams& params,
                           const UserGeometry& geometry, const CalibrationConfig& calib,
                           const PowerConfig& power) {
  plan.validate();
  params.validate();
  calib.validate();
  power.validate();
  SweepResult result;
  result.geometry = geometry;
  CurveRunner runner(plan, params, geometry, calib, power, result);

  std::map<std::string, std::vector<REPoint>> baselines;
  auto baseline_for = [&](const std::string& name) -> const std::vector<REPoint>& {
    auto it = baselines.find(name);
    if (it == baselines.end())
      it = baselines.emplace(name, baseline_points(name, geometry, params, plan)).first;
    return it->second;
  };

  std::vector<std::string> order;
  for (const auto& p : plan.policies) {
    if (std::find(order.begin(), order.end(), p) == order.end()) order.push_back(p);
    const std::string b = baseline_of(p);
    if (plan.baselines && !b.empty() && std::find(order.begin(), order.end(), b) == order.end())
      order.push_back(b);
  }
  for (const auto& p : order) {
    if (is_optimal_policy(p)) {
      const std::string b = baseline_of(p);
      static const std::vector<REPoint> kNone;
      const std::vector<REPoint>& base =
          plan.baselines && !b.empty() ? baseline_for(b) : kNone;
      runner.curve(p, base);
    } else {
      const auto& base = baseline_for(p);
      result.points.insert(result.points.end(), base.begin(), base.end());
    }
  }
  return result;
}

std::vector<REPoint> points_of(const std::vector<REPoint>& points, const std::string& policy) {
  std::vector<REPoint> out;
  for (const auto& p : points)
    if (p.policy == policy) out.push_back(p);
  return out;
}

namespace {

struct CurveValue {
  double r = 0.0, se_r = 0.0, se_q = 0.0;
};

// Linear interpolation on points sorted by harvest, flat below the first
// point. The caller checks the span.
CurveValue interpolate(const std::vector<REPoint>& pts, double q) {
  if (q <= pts.front().q_sum_w) return {pts.front().r_sum_bpcu, pts.front().stderr_r, pts.front().stderr_q};
  if (q >= pts.back().q_sum_w) return {pts.back().r_sum_bpcu, pts.back().stderr_r, pts.back().stderr_q};
  std::size_t i = 1;
  while (pts[i].q_sum_w < q) ++i;
  const REPoint& a = pts[i - 1];
  const REPoint& b = pts[i];
  const double w = b.q_sum_w > a.q_sum_w ? (q - a.q_sum_w) / (b.q_sum_w - a.q_sum_w) : 1.0;
  return {a.r_sum_bpcu + w * (b.r_sum_bpcu - a.r_sum_bpcu),
          (1.0 - w) * a.stderr_r + w * b.stderr_r, (1.0 - w) * a.stderr_q + w * b.stderr_q};
}

}  // namespace

DominanceMargin dominance_margin(const std::vector<REPoint>& curve, const REPoint& point) {
  std::vector<REPoint> pts;
  for (const auto& p : curve)
    if (resolved(p)) pts.push_back(p);
  std::stable_sort(pts.begin(), pts.end(),
                   [](const REPoint& a, const REPoint& b) { return a.q_sum_w < b.q_sum_w; });
  if (pts.size() < 2) throw ExtrapolationRequired("the optimal curve has fewer than two points");

  const double q = point.q_sum_w;
  if (q < pts.front().q_sum_w && pts.front().nu != 0.0) {
    std::ostringstream msg;
    msg << "harvest " << q << " W lies below the curve's span";
    throw ExtrapolationRequired(msg.str());
  }
  if (q > pts.back().q_sum_w) {
    std::ostringstream msg;
    msg << "harvest " << q << " W lies above the curve's span (max " << pts.back().q_sum_w << " W)";
    throw ExtrapolationRequired(msg.str());
  }

  DominanceMargin m;
  m.baseline = point.policy;
  m.order = point.order;
  m.q_sum_w = q;
  m.r_baseline = point.r_sum_bpcu;
  const CurveValue at = interpolate(pts, q);
  m.r_curve = at.r;
  m.margin = m.r_curve - m.r_baseline;
  // The comparison happens at a measured harvest: its noise enters as the
  // change of the curve across one combined harvest standard error.
  const double dq = std::hypot(point.stderr_q, at.se_q);
  const double se_shift = 0.5 * std::abs(interpolate(pts, q - dq).r - interpolate(pts, q + dq).r);
  m.stderr = std::sqrt(at.se_r * at.se_r + point.stderr_r * point.stderr_r + se_shift * se_shift);
  return m;
}

std::vector<DominanceMargin> dominance_check(const std::vector<REPoint>& curve,
                                             const std::vector<REPoint>& baseline_points) {
  std::vector<DominanceMargin> out;
  for (const auto& p : baseline_points) out.push_back(dominance_margin(curve, p));
  return out;
}

ExperimentSummary summarize(const SweepResult& result, std::uint64_t seed) {
  ExperimentSummary s;
  s.tool_version = kToolVersion;
  {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    s.generated_at = buf;
  }
  s.seed = seed;
  s.distances_m = result.geometry.distance_m;
  s.points = result.points;
  s.calibrations = static_cast<int>(result.reports.size());
  for (const auto& r : result.reports) s.converged += r.converged ? 1 : 0;
  for (const auto& p : result.points) s.skipped += p.skipped ? 1 : 0;

  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : result.points) {
    if (!is_optimal_policy(p.policy)) continue;
    const std::string b = p.policy == "joint" ? "mt" : baseline_of(p.policy);
    const std::pair<std::string, std::string> pr{p.policy, b};
    if (std::find(pairs.begin(), pairs.end(), pr) == pairs.end()) pairs.push_back(pr);
  }
  for (const auto& [curve_name, base_name] : pairs) {
    const auto curve = points_of(result.points, curve_name);
    for (const auto& b : points_of(result.points, base_name)) {
      if (!resolved(b)) continue;
      DominanceEntry e;
      e.curve = curve_name;
      try {
        e.margin = dominance_margin(curve, b);
      } catch (const ExtrapolationRequired& ex) {
        e.margin.baseline = b.policy;
        e.margin.order = b.order;
        e.margin.q_sum_w = b.q_sum_w;
        e.margin.r_baseline = b.r_sum_bpcu;
        e.margin.r_curve = e.margin.margin = kNaN;
        e.error = ex.what();
      }
      s.dominance.push_back(std::move(e));
    }
  }
  return s;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_csv(const std::vector<REPoint>& points) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& p : points) {
    out << p.policy << ',' << format_double(p.q_req_w) << ',' << format_double(p.q_sum_w) << ','
        << format_double(p.r_sum_bpcu) << ',' << format_double(p.nu) << ',' << format_double(p.mu)
        << ',' << format_double(p.stderr_q) << ',' << format_double(p.stderr_r) << '\n';
  }
  return out.str();
}

std::string format_trace(const CalibrationReport& report) {
  std::ostringstream out;
  out << "# policy " << report.policy << " q_req_w " << format_double(report.q_req_w) << '\n';
  out << "# m nu mu q_sum_w r_sum_bpcu p_used_w energy_residual share_residual "
         "throughput_spread power_residual\n";
  for (const auto& r : report.trace) {
    out << r.m << ' ' << format_double(r.nu) << ' ' << format_double(r.mu) << ' '
        << format_double(r.q_sum) << ' ' << format_double(r.r_sum) << ' ' << format_double(r.p_used)
        << ' ' << format_double(r.energy_residual) << ' ' << format_double(r.share_residual) << ' '
        << format_double(r.throughput_spread) << ' ' << format_double(r.power_residual) << '\n';
  }
  out << "# converged " << (report.converged ? 1 : 0) << '\n';
  out << "# iterations " << report.iterations << '\n';
  out << "# nu " << format_double(report.duals.nu) << '\n';
  out << "# mu " << format_double(report.duals.mu) << '\n';
  auto list = [&](const char* name, const std::vector<double>& v) {
    out << "# " << name;
    for (double x : v) out << ' ' << format_double(x);
    out << '\n';
  };
  list("gamma", report.duals.gamma);
  list("theta", report.duals.theta);
  if (!report.note.empty()) out << "# note " << report.note << '\n';
  return out.str();
}

namespace {

using nlohmann::json;

json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double from_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return kNaN;
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  throw std::invalid_argument("bad numeric field '" + s + "'");
}

}  // namespace

std::string summary_to_json(const ExperimentSummary& s) {
  json j;
  j["tool_version"] = s.tool_version;
  j["generated_at"] = s.generated_at;
  j["seed"] = s.seed;
  j["distances_m"] = json::array();
  for (double d : s.distances_m) j["distances_m"].push_back(num(d));
  j["calibrations"] = s.calibrations;
  j["converged"] = s.converged;
  j["skipped"] = s.skipped;
  j["points"] = json::array();
  for (const auto& p : s.points) {
    j["points"].push_back({{"policy", p.policy},
                           {"order", p.order},
                           {"q_req_w", num(p.q_req_w)},
                           {"q_sum_w", num(p.q_sum_w)},
                           {"r_sum_bpcu", num(p.r_sum_bpcu)},
                           {"p_used_w", num(p.p_used_w)},
                           {"nu", num(p.nu)},
                           {"mu", num(p.mu)},
                           {"stderr_q", num(p.stderr_q)},
                           {"stderr_r", num(p.stderr_r)},
                           {"converged", p.converged},
                           {"skipped", p.skipped},
                           {"note", p.note}});
  }
  j["dominance"] = json::array();
  for (const auto& e : s.dominance) {
    j["dominance"].push_back({{"curve", e.curve},
                              {"baseline", e.margin.baseline},
                              {"order", e.margin.order},
                              {"q_sum_w", num(e.margin.q_sum_w)},
                              {"r_baseline", num(e.margin.r_baseline)},
                              {"r_curve", num(e.margin.r_curve)},
                              {"margin", num(e.margin.margin)},
                              {"stderr", num(e.margin.stderr)},
                              {"error", e.error}});
  }
  return j.dump(2) + "\n";
}

ExperimentSummary summary_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentSummary s;
  s.tool_version = j.at("tool_version").get<std::string>();
  s.generated_at = j.at("generated_at").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& d : j.at("distances_m")) s.distances_m.push_back(from_num(d));
  s.calibrations = j.at("calibrations").get<int>();
  s.converged = j.at("converged").get<int>();
  s.skipped = j.at("skipped").get<int>();
  for (const auto& jp : j.at("points")) {
    REPoint p;
    p.policy = jp.at("policy").get<std::string>();
    p.order = jp.at("order").get<int>();
    p.q_req_w = from_num(jp.at("q_req_w"));
    p.q_sum_w = from_num(jp.at("q_sum_w"));
    p.r_sum_bpcu = from_num(jp.at("r_sum_bpcu"));
    p.p_used_w = from_num(jp.at("p_used_w"));
    p.nu = from_num(jp.at("nu"));
    p.mu = from_num(jp.at("mu"));
    p.stderr_q = from_num(jp.at("stderr_q"));
    p.stderr_r = from_num(jp.at("stderr_r"));
    p.converged = jp.at("converged").get<bool>();
    p.skipped = jp.at("skipped").get<bool>();
    p.note = jp.at("note").get<std::string>();
    s.points.push_back(std::move(p));
  }
  for (const auto& je : j.at("dominance")) {
    DominanceEntry e;
    e.curve = je.at("curve").get<std::string>();
    e.margin.baseline = je.at("baseline").get<std::string>();
    e.margin.order = je.at("order").get<int>();
    e.margin.q_sum_w = from_num(je.at("q_sum_w"));
    e.margin.r_baseline = from_num(je.at("r_baseline"));
    e.margin.r_curve = from_num(je.at("r_curve"));
    e.margin.margin = from_num(je.at("margin"));
    e.margin.stderr = from_num(je.at("stderr"));
    e.error = je.at("error").get<std::string>();
    s.dominance.push_back(std::move(e));
  }
  return s;
}

ExperimentSummary read_summary(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return summary_from_json(buf.str());
}

namespace {

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

}  // namespace

void write_bundle(const std::filesystem::path& dir, const std::string& header_text,
                  const SweepResult& result, const ExperimentSummary& summary) {
  std::filesystem::create_directories(dir / "traces");
  write_text(dir / "header.cfg", header_text);
  std::vector<std::string> policies;
  for (const auto& p : result.points)
    if (std::find(policies.begin(), policies.end(), p.policy) == policies.end())
      policies.push_back(p.policy);
  for (const auto& name : policies)
    write_text(dir / (name + ".csv"), format_csv(points_of(result.points, name)));
  std::map<std::string, int> counter;
  for (const auto& r : result.reports) {
    char name[96];
    std::snprintf(name, sizeof name, "%s_%02d.trace", r.policy.c_str(), counter[r.policy]++);
    write_text(dir / "traces" / name, format_trace(r));
  }
  write_text(dir / "summary.json", summary_to_json(summary));
}

}  // namespace swipt
