#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "swipt/errors.hpp"
#include "swipt/experiment.hpp"

using namespace swipt;

namespace {

REPoint pt(const std::string& policy, double q, double r, double nu = 1.0) {
  REPoint p;
  p.policy = policy;
  p.q_sum_w = q;
  p.r_sum_bpcu = r;
  p.nu = nu;
  return p;
}

bool same(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::bit_cast<double>(rng());
    if (!std::isfinite(x)) continue;
    const std::string text = format_double(x);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(same(back, x));
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("csv layout") {
  const std::string csv = format_csv({pt("mt", 1e-7, 8.5)});
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(std::string(kCsvHeader) == "policy,q_req_w,q_sum_w,r_sum_bpcu,nu,mu,stderr_q,stderr_r");
  CHECK(csv.find("\nmt,") != std::string::npos);
}

TEST_CASE("dominance margin") {
  const std::vector<REPoint> curve{pt("mt", 1.0, 10.0, 0.0), pt("mt", 2.0, 8.0), pt("mt", 3.0, 5.0)};
  const auto m = dominance_margin(curve, pt("order_snr", 2.5, 6.0));
  CHECK(m.r_curve == doctest::Approx(6.5));
  CHECK(m.margin == doctest::Approx(0.5));
  CHECK(m.stderr == 0.0);

  CHECK(dominance_margin(curve, pt("order_snr", 0.5, 9.0)).r_curve == 10.0);
  CHECK_THROWS_AS(dominance_margin(curve, pt("order_snr", 3.5, 1.0)), ExtrapolationRequired);

  std::vector<REPoint> constrained = curve;
  constrained[0].nu = 2.0;
  CHECK_THROWS_AS(dominance_margin(constrained, pt("order_snr", 0.5, 9.0)), ExtrapolationRequired);
  CHECK_THROWS_AS(dominance_margin({curve[0]}, pt("order_snr", 1.0, 9.0)), ExtrapolationRequired);

  SUBCASE("skipped points are ignored") {
    std::vector<REPoint> c = curve;
    c.push_back(pt("mt", 4.0, 100.0));
    c.back().skipped = true;
    CHECK_THROWS_AS(dominance_margin(c, pt("order_snr", 3.5, 1.0)), ExtrapolationRequired);
  }
  SUBCASE("a point on the curve has zero margin") {
    CHECK(dominance_margin(curve, pt("order_snr", 2.0, 8.0)).margin == 0.0);
  }
}

TEST_CASE("summary json round-trip") {
  ExperimentSummary s;
  s.tool_version = kToolVersion;
  s.generated_at = "2026-01-01T00:00:00Z";
  s.seed = 42;
  s.distances_m = {3.25, 97.125};
  REPoint a = pt("pf", 1.2345678901234567e-7, 8.123456789012345);
  a.q_req_w = std::numeric_limits<double>::quiet_NaN();
  a.mu = std::numeric_limits<double>::infinity();
  a.stderr_q = 1e-300;
  a.note = "kept \"at\" achieved harvest";
  a.order = 3;
  a.converged = false;
  s.points = {a, pt("mt", 0.0, 0.0)};
  DominanceEntry e;
  e.curve = "pf";
  e.margin.baseline = "order_nsnr";
  e.margin.margin = -0.0125;
  e.margin.stderr = 0.01;
  s.dominance = {e};
  s.calibrations = 7;
  s.converged = 6;
  s.skipped = 1;

  const auto back = summary_from_json(summary_to_json(s));
  CHECK(back.seed == 42);
  CHECK(back.generated_at == s.generated_at);
  CHECK(back.distances_m == s.distances_m);
  REQUIRE(back.points.size() == 2);
  const REPoint& b = back.points[0];
  CHECK(std::isnan(b.q_req_w));
  CHECK(std::isinf(b.mu));
  CHECK(same(b.q_sum_w, a.q_sum_w));
  CHECK(same(b.r_sum_bpcu, a.r_sum_bpcu));
  CHECK(same(b.stderr_q, a.stderr_q));
  CHECK(b.note == a.note);
  CHECK(b.order == 3);
  CHECK(!b.converged);
  REQUIRE(back.dominance.size() == 1);
  CHECK(same(back.dominance[0].margin.margin, -0.0125));
  CHECK(back.calibrations == 7);
  CHECK(summary_to_json(back) == summary_to_json(s));

  const auto empty = summary_from_json(summary_to_json(ExperimentSummary{}));
  CHECK(empty.points.empty());
}

TEST_CASE("baseline points") {
  SystemParams params;
  const auto geometry = place_users(params);
  SweepPlan plan;
  plan.eval_slots = 5000;
  for (const char* b : {"order_snr", "order_nsnr", "order_et"}) {
    const auto pts = baseline_points(b, geometry, params, plan);
    REQUIRE(pts.size() == 4);
    std::vector<int> orders;
    for (const auto& p : pts) orders.push_back(p.order);
    std::sort(orders.begin(), orders.end());
    CHECK(orders == std::vector<int>{1, 2, 3, 4});
  }
  CHECK(baseline_of("pf") == "order_nsnr");
  CHECK(is_optimal_policy("joint"));
  CHECK(!is_optimal_policy("order_et"));
}

TEST_CASE("small mt sweep") {
  SystemParams params;
  const auto geometry = place_users(params);
  SweepPlan plan;
  plan.policies = {"mt"};
  plan.eval_slots = 20000;
  plan.grid_points = 5;
  CalibrationConfig calib;
  calib.batch_slots = 10000;
  const auto result = sweep_re_curve(plan, params, geometry, calib, PowerConfig{});
  const auto mt = points_of(result.points, "mt");
  CHECK(points_of(result.points, "order_snr").size() == 4);
  std::vector<REPoint> ok;
  for (const auto& p : mt)
    if (!p.skipped) ok.push_back(p);
  REQUIRE(ok.size() >= 5);
  for (std::size_t k = 1; k < ok.size(); ++k) {
    CHECK(ok[k].q_sum_w >= ok[k - 1].q_sum_w);
    CHECK(ok[k].r_sum_bpcu <= ok[k - 1].r_sum_bpcu + 2.0 * std::hypot(ok[k].stderr_r, ok[k - 1].stderr_r));
  }

  SUBCASE("bundle") {
    const auto dir = std::filesystem::temp_directory_path() / "swipt_bundle_test";
    std::filesystem::remove_all(dir);
    const auto summary = summarize(result, params.rng_seed);
    write_bundle(dir, "# header\n", result, summary);
    CHECK(slurp(dir / "header.cfg") == "# header\n");
    CHECK(slurp(dir / "mt.csv") == format_csv(mt));
    CHECK(std::filesystem::exists(dir / "traces" / "mt_00.trace"));
    const auto back = read_summary(dir / "summary.json");
    CHECK(back.points.size() == result.points.size());
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("sweep plan validation") {
  SweepPlan p;
  CHECK_NOTHROW(p.validate());
  p.policies = {"mt", "greedy"};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SweepPlan{};
  p.q_grid_w = {-1.0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
