#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dynprice/constraints.hpp"
#include "dynprice/demand.hpp"
#include "dynprice/errors.hpp"
#include "dynprice/planner_base.hpp"
#include "dynprice/simulator.hpp"

namespace testsupport {

using namespace dynprice;

struct Instance {
    ConstraintSchedule schedule;
    std::vector<LinearDemandParams> laws;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// k groups, l intervals, unclamped linear demand, final sales only.
inline Instance random_final_sales(std::mt19937_64& rng, std::size_t k, std::size_t l) {
    Instance inst;
    const double T = uniform(rng, 5.0, 20.0);
    std::vector<double> times{0.0};
    for (std::size_t j = 1; j < l; ++j) times.push_back(T * (static_cast<double>(j) + uniform(rng, -0.3, 0.3)) / l);
    times.push_back(T);
    std::vector<double> finals;
    for (std::size_t i = 0; i < k; ++i) {
        LinearDemandParams law;
        law.a = uniform(rng, 100.0, 400.0);
        law.b = uniform(rng, 1.0, 3.0);
        inst.laws.push_back(law);
        finals.push_back(law.a * T * uniform(rng, 0.2, 0.8));
    }
    inst.schedule = ConstraintSchedule::with_final_sales(times, finals);
    return inst;
}

/// Even-absorption aggregate revenue at each schedule time (no floors).
inline std::vector<double> even_revenue(const Instance& inst) {
    std::vector<double> out(inst.schedule.times.size(), 0.0);
    for (std::size_t i = 0; i < inst.laws.size(); ++i) {
        const double rate = inst.schedule.final_sales[i] / inst.schedule.horizon();
        const double p = inst.laws[i].invert(Rate{rate});
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += p * rate * inst.schedule.times[j];
    }
    return out;
}

/// Adds revenue floors above even absorption at some interior times. The
/// result is kept only if the base planner finds it feasible.
inline std::optional<Instance> random_with_floors(std::mt19937_64& rng, std::size_t k, std::size_t l) {
    Instance inst = random_final_sales(rng, k, l);
    const auto ea = even_revenue(inst);
    bool any = false;
    for (std::size_t j = 1; j < l; ++j) {
        if (uniform(rng, 0.0, 1.0) < 0.6) {
            inst.schedule.revenue_floors[j] = ea[j] * uniform(rng, 1.01, 1.15);
            any = true;
        }
    }
    if (!any) inst.schedule.revenue_floors[1] = ea[1] * uniform(rng, 1.01, 1.15);
    try {
        (void)plan(inst.schedule, inst.laws, DistributionMethod::headroom);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return inst;
}

/// Draws until `count` feasible floor scenarios exist (seeded, so stable).
inline std::vector<Instance> floor_family(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::vector<Instance> out;
    while (out.size() < count) {
        const std::size_t k = pick(rng, 1, 3);
        const std::size_t l = pick(rng, 2, 5);
        if (auto inst = random_with_floors(rng, k, l)) out.push_back(*inst);
    }
    return out;
}

/// Two groups, two intervals, a burdensome floor at the midpoint, bounded
/// prices so a 25-point grid is informative.
inline std::optional<Instance> small_oracle_instance(std::mt19937_64& rng) {
    Instance inst = random_final_sales(rng, 2, 2);
    for (auto& law : inst.laws) {
        law.price_lo = 0.0;
        law.price_hi = law.choke_price();
    }
    const auto ea = even_revenue(inst);
    inst.schedule.revenue_floors[1] = ea[1] * uniform(rng, 1.02, 1.12);
    try {
        (void)plan(inst.schedule, inst.laws, DistributionMethod::headroom);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return inst;
}

/// Clipped law scale * (a - b p) whose normalized demand runs from 1 at
/// `lo` to 0 at `hi`, with the cap at scale; bounds are [lo, hi].
inline LinearDemandParams ranged_law(double lo, double hi, double scale) {
    LinearDemandParams law;
    law.b = 1.0 / (hi - lo);
    law.a = hi * law.b;
    law.scale = scale;
    law.cap = scale;
    law.price_lo = lo;
    law.price_hi = hi;
    return law;
}

/// Paper-style two-group scenario with clipped demand and revenue floors at
/// t = 4, 6 and 10; price ranges, targets and floors jittered by `rng`.
inline Scenario two_group_draw(std::mt19937_64& rng) {
    Scenario s;
    s.name = "two-group draw";
    s.schedule.times = {0, 2, 4, 6, 8, 10};
    auto jitter = [&](double x, double j) { return x * uniform(rng, 1.0 - j, 1.0 + j); };

    GroupSpec g1{"g1", ranged_law(jitter(20, 0.1), jitter(120, 0.05), 300), 90};
    GroupSpec g2{"g2", ranged_law(jitter(90, 0.05), jitter(110, 0.05), 500), 100};
    g1.initial_price = std::clamp(90.0, g1.demand.price_lo, g1.demand.price_hi);
    g2.initial_price = std::clamp(100.0, g2.demand.price_lo, g2.demand.price_hi);
    s.groups = {g1, g2};
    s.schedule.final_sales = {std::round(jitter(550, 0.1)), std::round(jitter(600, 0.1))};
    s.schedule.sales_floors.assign(2, std::vector<std::optional<double>>(6));
    s.schedule.revenue_floors = {std::nullopt, std::nullopt, jitter(80000, 0.05),
                                 jitter(90000, 0.05), std::nullopt, jitter(100000, 0.05)};
    return s;
}

}  // namespace testsupport
