#include <cmath>
#include <random>

#include "doctest.h"
#include "dynprice/errors.hpp"
#include "dynprice/numeric.hpp"
#include "dynprice/planner_base.hpp"
#include "dynprice/planner_tvm.hpp"
#include "support.hpp"

using namespace dynprice;

namespace {

LinearDemandParams law(double a, double b) {
    LinearDemandParams p;
    p.a = a;
    p.b = b;
    return p;
}

TimeValueSpec discounted(double rate = 0.1) {
    TimeValueSpec tv;
    tv.phi = ValueCurve::exponential(1.0, -rate);
    return tv;
}

double quad_sales(const TimeValueSpec& tv, const LinearDemandParams& l, const PriceCurve& c, double t0,
                  double t1) {
    return numeric::adaptive_simpson([&](double t) { return l.rate(evaluate(c, tv, t)).value; }, t0, t1,
                                     1e-12);
}

double quad_revenue(const PricingPolicy& p, std::size_t i, const LinearDemandParams& l, double t0,
                    double t1) {
    return numeric::adaptive_simpson(
        [&](double t) {
            const double x = p.price_at(i, t);
            return p.time_value.zeta(t) * x * l.rate(x).value;
        },
        t0, t1, 1e-12);
}

}  // namespace

TEST_CASE("neutral closed form is even absorption") {
    auto c = closed_form_policy(TimeValueSpec::neutral(), law(300, 2), 1000, 0, 10);
    CHECK(c.q == doctest::Approx(-50));
    for (double t : {0.0, 5.0, 10.0}) CHECK(evaluate(c.curve, TimeValueSpec::neutral(), t) == doctest::Approx(100));
}

TEST_CASE("discounted closed form") {
    const auto tv = discounted();
    auto c = closed_form_policy(tv, law(300, 2), 1000, 0, 10);
    CHECK(c.q == doctest::Approx(-29.0988).epsilon(1e-5));
    CHECK(evaluate(c.curve, tv, 0) == doctest::Approx(89.549).epsilon(1e-5));
    CHECK(evaluate(c.curve, tv, 10) == doctest::Approx(114.549).epsilon(1e-5));
    CHECK(quad_sales(tv, law(300, 2), c.curve, 0, 10) == doctest::Approx(1000).epsilon(1e-9));
    CHECK(curve_sales(tv, law(300, 2), c.q, 0, 10) == doctest::Approx(1000).epsilon(1e-12));
}

TEST_CASE("selling half the choke volume gives q = 0") {
    auto c = closed_form_policy(TimeValueSpec::neutral(), law(300, 2), 1500, 0, 10);
    CHECK(c.q == doctest::Approx(0).epsilon(1e-12));
    CHECK(evaluate(c.curve, TimeValueSpec::neutral(), 3) == doctest::Approx(75));
}

TEST_CASE("curves leaving the branch or bounds are rejected") {
    CHECK_THROWS_AS(closed_form_policy(discounted(0.5), law(300, 2), 200, 0, 10), BranchViolation);
    auto bounded = law(300, 2);
    bounded.price_hi = 110;
    CHECK_THROWS_AS(closed_form_policy(discounted(), bounded, 1000, 0, 10), BranchViolation);
    CHECK_NOTHROW(check_branch(TimeValueSpec::neutral(), law(300, 2), -50, 0, 10));
}

TEST_CASE("curve_revenue matches quadrature") {
    const auto tv = discounted();
    auto c = closed_form_policy(tv, law(300, 2), 1000, 0, 10);
    PricingPolicy p;
    p.time_value = tv;
    p.append(0, {0, 10, c.curve});
    CHECK(curve_revenue(tv, law(300, 2), c.q, 0, 10) ==
          doctest::Approx(quad_revenue(p, 0, law(300, 2), 0, 10)).epsilon(1e-9));
}

TEST_CASE("stationarity residuals") {
    const auto tv = discounted();
    auto c = closed_form_policy(tv, law(300, 2), 1000, 0, 10);
    CHECK(verify_stationarity(tv, law(300, 2), c.curve, c.q, 0, 10) <= 1e-8);
    CHECK(verify_stationarity(tv, law(300, 2), c.curve, c.q + 1, 0, 10) > 1e-4);
    auto n = closed_form_policy(TimeValueSpec::neutral(), law(300, 2), 1000, 0, 10);
    CHECK(verify_stationarity(TimeValueSpec::neutral(), law(300, 2), ConstantPrice{100}, n.q, 0, 10) <= 1e-12);
}

TEST_CASE("recalculation with a floor already met keeps q") {
    auto s = ConstraintSchedule::with_final_sales({0, 5, 10}, {1000});
    s.revenue_floors[1] = 50000.0;
    std::vector<LinearDemandParams> laws{law(300, 2)};
    const auto tv = TimeValueSpec::neutral();
    auto state = PlannerState::initial(1);
    auto cur = tvm_projection(state, s, laws, tv);
    auto r = recalc_constants_for_floor(tv, laws, state, s, cur, 1, DistributionMethod::headroom);
    CHECK(r.q[0] == doctest::Approx(-50).epsilon(1e-9));
}

TEST_CASE("recalculation up to the maximum revenue gives q = 0") {
    auto s = ConstraintSchedule::with_final_sales({0, 5, 10}, {1000});
    s.revenue_floors[1] = 5 * 11250.0;
    std::vector<LinearDemandParams> laws{law(300, 2)};
    const auto tv = TimeValueSpec::neutral();
    auto state = PlannerState::initial(1);
    auto r = recalc_constants_for_floor(tv, laws, state, s, tvm_projection(state, s, laws, tv), 1,
                                        DistributionMethod::headroom);
    CHECK(r.q[0] == doctest::Approx(0).epsilon(1e-6));
}

TEST_CASE("discounted two-group plan meets its burdensome floor with equality") {
    const auto tv = discounted();
    auto s = ConstraintSchedule::with_final_sales({0, 4, 10}, {1000, 700});
    std::vector<LinearDemandParams> laws{law(300, 2), law(220, 1)};
    auto free = plan_tvm(s, laws, tv, DistributionMethod::headroom);
    s.revenue_floors[1] = free.predicted.aggregate_at(4) * 1.03;
    auto r = plan_tvm(s, laws, tv, DistributionMethod::headroom);
    REQUIRE(r.selected == std::vector<std::size_t>{1});
    double quad = 0.0;
    for (std::size_t i = 0; i < 2; ++i) quad += quad_revenue(r.policy, i, laws[i], 0, 4);
    CHECK(quad == doctest::Approx(*s.revenue_floors[1]).epsilon(1e-7));
    for (std::size_t i = 0; i < 2; ++i) {
        double sold = 0.0;
        for (const auto& seg : r.policy.groups[i].segments) sold += quad_sales(tv, laws[i], seg.curve, seg.begin, seg.end);
        CHECK(sold == doctest::Approx(s.final_sales[i]).epsilon(1e-7));
    }
}

TEST_CASE("no burdensome floor gives one closed-form segment") {
    const auto tv = discounted();
    auto s = ConstraintSchedule::with_final_sales({0, 4, 10}, {1000});
    s.revenue_floors[1] = 1000.0;
    std::vector<LinearDemandParams> laws{law(300, 2)};
    auto r = plan_tvm(s, laws, tv, DistributionMethod::headroom);
    REQUIRE(r.policy.groups[0].segments.size() == 1);
    const auto* c = std::get_if<DiscountedLinearPrice>(&r.policy.groups[0].segments[0].curve);
    REQUIRE(c != nullptr);
    CHECK(c->q == doctest::Approx(-29.0988).epsilon(1e-5));
}

TEST_CASE("construction uplift raises posted prices and leaves sales unchanged") {
    TimeValueSpec tv;
    tv.kappa = ValueCurve::table({0, 10}, {1.0, 1.5});
    auto s = ConstraintSchedule::with_final_sales({0, 10}, {1000});
    std::vector<LinearDemandParams> laws{law(300, 2)};
    auto r = plan_tvm(s, laws, tv, DistributionMethod::headroom);
    double prev = 0.0;
    for (int n = 0; n <= 20; ++n) {
        const double t = 0.5 * n;
        const double posted = r.policy.posted_price_at(0, t);
        CHECK(posted == doctest::Approx(tv.kappa(t) * r.policy.price_at(0, t)));
        CHECK(posted > prev);
        prev = posted;
    }
    const auto& seg = r.policy.groups[0].segments[0];
    CHECK(quad_sales(tv, laws[0], seg.curve, 0, 10) == doctest::Approx(1000).epsilon(1e-9));
    CHECK(r.predicted.sales_at(0, 10) == doctest::Approx(1000).epsilon(1e-9));
}

TEST_CASE("property: neutral time value reduces to the base planner") {
    for (auto method : {DistributionMethod::headroom, DistributionMethod::revenue_share}) {
        for (const auto& inst : testsupport::floor_family(51, 30)) {
            PlanResult base;
            try {
                base = plan(inst.schedule, inst.laws, method);
            } catch (const std::exception&) {
                continue;
            }
            auto tvm = plan_tvm(inst.schedule, inst.laws, TimeValueSpec::neutral(), method);
            double sup = 0.0;
            for (std::size_t i = 0; i < inst.laws.size(); ++i) {
                for (double t : base.predicted.grid) {
                    sup = std::max(sup, std::abs(base.policy.price_at(i, t) - tvm.policy.price_at(i, t)));
                }
            }
            CHECK(sup <= 1e-6);
        }
    }
}

TEST_CASE("property: discounted plans are stationary and sell exactly") {
    std::mt19937_64 rng(52);
    int planned = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto inst = testsupport::random_final_sales(rng, testsupport::pick(rng, 1, 3), testsupport::pick(rng, 2, 4));
        const auto tv = discounted(testsupport::uniform(rng, 0.01, 0.08));
        PlanResult r;
        try {
            auto free = plan_tvm(inst.schedule, inst.laws, tv, DistributionMethod::headroom);
            inst.schedule.revenue_floors[1] = free.predicted.aggregate_at(inst.schedule.times[1]) * 1.02;
            r = plan_tvm(inst.schedule, inst.laws, tv, DistributionMethod::headroom);
        } catch (const std::exception&) {
            continue;
        }
        ++planned;
        for (std::size_t i = 0; i < inst.laws.size(); ++i) {
            double sold = 0.0;
            for (const auto& seg : r.policy.groups[i].segments) {
                const auto* c = std::get_if<DiscountedLinearPrice>(&seg.curve);
                REQUIRE(c != nullptr);
                CHECK(verify_stationarity(tv, inst.laws[i], seg.curve, c->q, seg.begin, seg.end) <= 1e-8);
                sold += quad_sales(tv, inst.laws[i], seg.curve, seg.begin, seg.end);
            }
            CHECK(sold == doctest::Approx(inst.schedule.final_sales[i]).epsilon(1e-6));
        }
    }
    CHECK(planned >= 30);
}
