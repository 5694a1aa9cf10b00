#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numeric>

#include "swipt/calibrate.hpp"
#include "swipt/policy.hpp"

using namespace swipt;

namespace {

SlotChannel slot_of(std::vector<double> gains) { return SlotChannel{0, std::move(gains)}; }

int best(const std::vector<double>& metric) { return argmax_lowest(metric); }

}  // namespace

TEST_CASE("argmax and order ranking") {
  CHECK(argmax_lowest(std::vector<double>{3.0, 5.0}) == 1);
  CHECK(argmax_lowest(std::vector<double>{1.0, 1.0}) == 0);
  const std::vector<double> h{0.3, 0.1, 0.2};
  CHECK(user_at_order(h, 1) == 1);
  CHECK(user_at_order(h, 2) == 2);
  CHECK(user_at_order(h, 3) == 0);
}

TEST_CASE("mt metric") {
  SystemParams p;
  p.n_users = 3;
  const auto link = LinkBudget::from(p);
  const auto slot = slot_of({2e-7, 9e-7, 4e-7});
  CHECK(best(metric_mt(slot, PolicySpec::mt(0.0, 3).duals, link)) == 1);
  CHECK(best(metric_mt(slot, PolicySpec::mt(1e9, 3).duals, link)) == 0);

  SUBCASE("two-user hand evaluation") {
    SystemParams q;
    q.n_users = 2;
    q.noise_power_dbm = watts_to_dbm(6.3096e-10);
    const auto l2 = LinkBudget::from(q);
    const auto m = metric_mt(slot_of({1e-6, 2e-6}), PolicySpec::mt(1e5, 2).duals, l2);
    // log2(1 + 10 h / 6.3096e-10) - 1e5 * 0.5 * 10 h, evaluated at 40 digits.
    CHECK(m[0] == doctest::Approx(13.452182952061719).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(13.952137440072284).epsilon(1e-12));
    CHECK(best(m) == 1);
  }
}

TEST_CASE("pf and et metrics reduce to mt") {
  SystemParams p;
  const auto link = LinkBudget::from(p);
  const auto geometry = place_users(p);
  Engine rng = StreamKey{9, StreamTag::kEvaluation, 0}.engine();
  for (int i = 0; i < 200; ++i) {
    const auto slot = draw_slot(geometry, rng, i);
    const double nu = i % 2 ? 0.0 : 2e5;
    const int mt = best(metric_mt(slot, PolicySpec::mt(nu, 4).duals, link));
    CHECK(best(metric_pf(slot, PolicySpec::pf(nu, {0.7, 0.7, 0.7, 0.7}).duals, link)) == mt);
    CHECK(best(metric_pf(slot, PolicySpec::pf(nu, {0, 0, 0, 0}).duals, link)) == mt);
    if (nu == 0.0)
      CHECK(best(metric_et(slot, PolicySpec::et(0.0, {0.25, 0.25, 0.25, 0.25}).duals, link)) == mt);
  }
}

TEST_CASE("et metric with a zero weight") {
  SystemParams p;
  p.n_users = 2;
  const auto link = LinkBudget::from(p);
  const auto m = metric_et(slot_of({1e-6, 1e-9}), PolicySpec::et(1e3, {0.0, 1.0}).duals, link);
  CHECK(m[0] < 0.0);
  CHECK(best(m) == 1);
}

TEST_CASE("order baselines") {
  SystemParams p;
  p.n_users = 2;
  const auto link = LinkBudget::from(p);
  UserGeometry g;
  g.mean_gain = {8.0, 1.0};
  g.distance_m = {2.0, 2.0};
  CHECK(select_order_nsnr(slot_of({4.0, 1.0}), g, 2, link).selected == 1);
  CHECK(select_order_snr(slot_of({4.0, 1.0}), 2, link).selected == 0);

  SUBCASE("equal mean gains make nsnr and snr agree") {
    UserGeometry e;
    e.mean_gain = {1e-6, 1e-6};
    for (double x : {0.1, 0.5, 3.0})
      CHECK(select_order_nsnr(slot_of({x, 1.0}), e, 1, link).selected ==
            select_order_snr(slot_of({x, 1.0}), 1, link).selected);
  }
  SUBCASE("order-et first slot tie breaks to the lowest allowed user") {
    OrderEtState state(2);
    const std::vector<int> all{1, 2};
    CHECK(select_order_et(slot_of({1.0, 7.0}), g, all, state, link).selected == 0);
    const std::vector<int> top{2};
    OrderEtState s2(2);
    CHECK(select_order_et(slot_of({1.0, 7.0}), g, top, s2, link).selected == 1);
  }
}

TEST_CASE("long-run order baselines") {
  SystemParams p;
  const auto geometry = place_users(p);
  const auto trace = generate_trace(geometry, StreamKey{4, StreamTag::kEvaluation, 0}, 100000);

  const auto top = selections_on_trace(PolicySpec::order_et({4}), trace, geometry, p);
  CHECK(top == selections_on_trace(PolicySpec::order_nsnr(4), trace, geometry, p));

  const auto mt = selections_on_trace(PolicySpec::mt(0.0, 4), trace, geometry, p);
  CHECK(mt == selections_on_trace(PolicySpec::order_snr(4), trace, geometry, p));

  const auto a = evaluate_on_trace(PolicySpec::mt(0.0, 4), trace, geometry, p);
  const auto b = evaluate_on_trace(PolicySpec::order_snr(4), trace, geometry, p);
  CHECK(a.r_sum == b.r_sum);
  CHECK(a.q_sum == b.q_sum);
  CHECK(a.access == b.access);
  CHECK(a.r_sum == doctest::Approx(std::accumulate(a.user_rate.begin(), a.user_rate.end(), 0.0))
                       .epsilon(1e-12));
}

TEST_CASE("nsnr order shares are uniform") {
  SystemParams p;
  const auto geometry = place_users(p);
  for (int j : {1, 3}) {
    const auto agg = evaluate_policy(PolicySpec::order_nsnr(j), geometry, p, 1000000,
                                     StreamKey{2, StreamTag::kEvaluation, 0});
    for (int n = 0; n < 4; ++n) CHECK(std::abs(agg.share(n) - 0.25) < 0.0025);
  }
}

TEST_CASE("symmetric pair splits access evenly") {
  SystemParams p;
  p.n_users = 2;
  const auto geometry = geometry_from_distances(p, {30.0, 30.0});
  const auto agg = evaluate_policy(PolicySpec::order_snr(2), geometry, p, 200000,
                                   StreamKey{2, StreamTag::kEvaluation, 0});
  CHECK(std::abs(agg.share(0) - 0.5) < 0.005);
}

TEST_CASE("policy validation") {
  CHECK_THROWS_AS(PolicySpec::order_snr(5).validate(4), std::invalid_argument);
  CHECK_THROWS_AS(PolicySpec::mt(-1.0, 4).validate(4), std::invalid_argument);
  CHECK_THROWS_AS(PolicySpec::et(0.0, {0, 0, 0, 0}).validate(4), std::invalid_argument);
  CHECK_THROWS_AS(PolicySpec::et(0.0, {1.5, 0, 0, 0}).validate(4), std::invalid_argument);
  CHECK(parse_policy_kind("MT") == PolicyKind::kMT);
  CHECK_THROWS_AS(parse_policy_kind("greedy"), std::invalid_argument);
}
