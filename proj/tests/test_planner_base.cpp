#include <cmath>
#include <random>

#include "doctest.h"
#include "dynprice/errors.hpp"
#include "dynprice/planner_base.hpp"
#include "support.hpp"

using namespace dynprice;

namespace {

LinearDemandParams law(double a, double b) {
    LinearDemandParams p;
    p.a = a;
    p.b = b;
    return p;
}

/// One group a=300, b=2 selling 1000 over [0, 10]; even absorption is p=100
/// at 10000 per unit time.
ConstraintSchedule single(std::vector<double> times) {
    return ConstraintSchedule::with_final_sales(std::move(times), {1000});
}

}  // namespace

TEST_CASE("even absorption without intermediate floors") {
    std::vector<LinearDemandParams> laws{law(300, 2)};
    auto e = even_absorption_prices(PlannerState::initial(1), single({0, 10}), laws);
    CHECK(e[0].price == doctest::Approx(100));
    CHECK(e[0].rate == doctest::Approx(100));
    CHECK(e[0].binding_index == 1);
}

TEST_CASE("an intermediate sales floor sets the rate") {
    auto s = single({0, 2, 10});
    s.sales_floors[0][1] = 600.0;
    std::vector<LinearDemandParams> laws{law(300, 2)};
    auto e = even_absorption_prices(PlannerState::initial(1), s, laws);
    CHECK(e[0].rate == doctest::Approx(300));
    CHECK(e[0].price == doctest::Approx(0));
    CHECK(e[0].binding_index == 1);
}

TEST_CASE("zero remaining sales price at the choke") {
    auto s = ConstraintSchedule::with_final_sales({0, 10}, {0});
    std::vector<LinearDemandParams> laws{law(300, 2)};
    CHECK(even_absorption_prices(PlannerState::initial(1), s, laws)[0].price == doctest::Approx(150));
}

TEST_CASE("unreachable sales within price bounds are infeasible") {
    auto l = law(300, 2);
    l.price_lo = 120;
    std::vector<LinearDemandParams> laws{l};
    CHECK_THROWS_AS(even_absorption_prices(PlannerState::initial(1), single({0, 10}), laws),
                    InfeasibleScenario);
}

TEST_CASE("burdensome detection") {
    auto s = single({0, 2, 4, 10});
    s.revenue_floors[1] = 25000.0;
    s.revenue_floors[2] = 42000.0;
    std::vector<double> expected{0, 20000, 40000, 100000};
    auto state = PlannerState::initial(1);
    CHECK(detect_burdensome(state, s, expected) == std::vector<std::size_t>{1, 2});

    auto loose = single({0, 2, 10});
    loose.revenue_floors[1] = 15000.0;
    std::vector<double> e2{0, 20000, 100000};
    CHECK(detect_burdensome(state, loose, e2).empty());
}

TEST_CASE("most stringent floor") {
    auto s = single({0, 2, 4, 10});
    s.revenue_floors[1] = 25000.0;
    s.revenue_floors[2] = 42000.0;
    std::vector<double> expected{0, 20000, 40000, 100000};
    std::vector<std::size_t> j{1, 2};
    auto m = most_stringent(PlannerState::initial(1), s, expected, j);
    CHECK(m.index == 1);
    CHECK(m.required_rate == doctest::Approx(12500));

    std::vector<std::size_t> only{2};
    CHECK(most_stringent(PlannerState::initial(1), s, expected, only).index == 2);

    // 2000 over 2 and 4000 over 4 tie; the earlier floor wins.
    s.revenue_floors[1] = 22000.0;
    s.revenue_floors[2] = 44000.0;
    CHECK(most_stringent(PlannerState::initial(1), s, expected, j).index == 1);
}

TEST_CASE("no revenue floors gives constant even-absorption prices") {
    auto s = ConstraintSchedule::with_final_sales({0, 2, 4, 10}, {1000, 800});
    std::vector<LinearDemandParams> laws{law(300, 2), law(220, 1)};
    auto r = plan(s, laws, DistributionMethod::headroom);
    CHECK(r.selected.empty());
    CHECK(r.allocations.empty());
    CHECK(r.policy.breakpoints(0).empty());
    CHECK(r.policy.price_at(0, 7) == doctest::Approx(100));
    CHECK(r.policy.price_at(1, 7) == doctest::Approx(140));
}

TEST_CASE("the most stringent floor gets the only breakpoint") {
    // Stringency 250, 1000 and 167 per unit time at tau_1..tau_3.
    auto s = single({0, 2, 4, 6, 10});
    s.revenue_floors[1] = 20500.0;
    s.revenue_floors[2] = 44000.0;
    s.revenue_floors[3] = 61000.0;
    std::vector<LinearDemandParams> laws{law(300, 2)};
    auto r = plan(s, laws, DistributionMethod::headroom);
    CHECK(r.selected == std::vector<std::size_t>{2});
    CHECK(r.policy.breakpoints(0) == std::vector<double>{4});
    CHECK(r.predicted.aggregate_at(4) == doctest::Approx(44000).epsilon(1e-9));
    CHECK(r.policy.price_at(0, 1) == doctest::Approx((300 + std::sqrt(2000.0)) / 4).epsilon(1e-9));
    CHECK(r.predicted.sales_at(0, 10) == doctest::Approx(1000).epsilon(1e-9));
}

TEST_CASE("a burdensome floor at the horizon is infeasible") {
    auto s = single({0, 5, 10});
    s.revenue_floors[2] = 100001.0;
    std::vector<LinearDemandParams> laws{law(300, 2)};
    CHECK_THROWS_AS(plan(s, laws, DistributionMethod::headroom), InfeasibleScenario);
}

TEST_CASE("planning from a schedule point continues the plan") {
    auto s = single({0, 2, 4, 6, 10});
    s.revenue_floors[2] = 44000.0;
    std::vector<LinearDemandParams> laws{law(300, 2)};
    auto full = plan(s, laws, DistributionMethod::headroom);
    auto st = PlannerState::at(s, 4, {full.predicted.sales_at(0, 4)}, {full.predicted.revenue_at(0, 4)});
    auto rest = plan(s, laws, DistributionMethod::headroom, st);
    for (double t : {4.0, 5.0, 9.0}) {
        CHECK(rest.policy.price_at(0, t) == doctest::Approx(full.policy.price_at(0, t)).epsilon(1e-9));
    }
}

TEST_CASE("property: breakpoints only at schedule times") {
    for (const auto& inst : testsupport::floor_family(41, 40)) {
        auto r = plan(inst.schedule, inst.laws, DistributionMethod::headroom);
        const auto& tau = inst.schedule.times;
        for (std::size_t i = 0; i < inst.laws.size(); ++i) {
            for (double b : r.policy.breakpoints(i)) {
                bool found = false;
                for (std::size_t j = 1; j + 1 < tau.size(); ++j) found |= std::abs(b - tau[j]) < 1e-9;
                CHECK(found);
            }
        }
    }
}

TEST_CASE("property: plans are feasible and meet selected floors with equality") {
    for (auto method : {DistributionMethod::headroom, DistributionMethod::revenue_share}) {
        for (const auto& inst : testsupport::floor_family(42, 40)) {
            PlanResult r;
            try {
                r = plan(inst.schedule, inst.laws, method);
            } catch (const InfeasibleTarget&) {
                continue;
            } catch (const InfeasibleScenario&) {
                continue;
            }
            const double tol = default_tolerance(inst.schedule);
            CHECK_FALSE(check_feasibility_against(inst.schedule, r.predicted, tol).has_value());
            for (std::size_t j : r.selected) {
                CHECK(r.predicted.aggregate_at(inst.schedule.times[j]) ==
                      doctest::Approx(*inst.schedule.revenue_floors[j]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("property: without burdensome floors the plan is even absorption") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        auto inst = testsupport::random_final_sales(rng, testsupport::pick(rng, 1, 4),
                                                    testsupport::pick(rng, 1, 5));
        const auto ea = testsupport::even_revenue(inst);
        for (std::size_t j = 1; j < ea.size(); ++j) {
            if (testsupport::uniform(rng, 0, 1) < 0.5) inst.schedule.revenue_floors[j] = ea[j] * 0.9;
        }
        auto e = even_absorption_prices(PlannerState::initial(inst.laws.size()), inst.schedule, inst.laws);
        auto r = plan(inst.schedule, inst.laws, DistributionMethod::headroom);
        CHECK(r.selected.empty());
        for (std::size_t i = 0; i < inst.laws.size(); ++i) {
            CHECK(r.policy.groups[i].segments.size() == 1);
            CHECK(r.policy.price_at(i, 0) == e[i].price);
        }
    }
}
