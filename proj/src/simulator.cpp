#include "dynprice/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "dynprice/errors.hpp"
#include "dynprice/planner_base.hpp"
#include "dynprice/planner_tvm.hpp"

namespace dynprice {

const char* to_string(PlannerKind kind) { return kind == PlannerKind::base ? "base" : "tvm"; }

std::optional<PlannerKind> parse_planner_kind(std::string_view name) {
    if (name == "base") return PlannerKind::base;
    if (name == "tvm") return PlannerKind::tvm;
    return std::nullopt;
}

std::vector<LinearDemandParams> Scenario::initial_laws() const {
    std::vector<LinearDemandParams> out;
    for (const auto& g : groups) out.push_back(g.demand);
    return out;
}

void Scenario::validate() const {
    if (groups.empty()) throw DomainError("scenario: no groups");
    if (schedule.group_count() != groups.size()) {
        throw DomainError("scenario: schedule has " + std::to_string(schedule.group_count()) +
                          " groups, scenario has " + std::to_string(groups.size()));
    }
    if (auto v = dynprice::validate(schedule); !v.empty()) {
        throw DomainError("scenario: " + v.front().field + ": " + v.front().message);
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        g.demand.validate();
        if (g.initial_price < g.demand.price_lo || g.initial_price > g.demand.price_hi) {
            throw DomainError("scenario: groups[" + std::to_string(i) +
                              "].initial_price outside its price bounds");
        }
    }
    time_value.validate(horizon());
    double last = 0.0;
    for (std::size_t e = 0; e < events.size(); ++e) {
        const auto& ev = events[e];
        if (!(ev.time > last) || !(ev.time < horizon())) {
            throw DomainError("scenario: events[" + std::to_string(e) +
                              "].time must be in (0, T) and strictly increasing");
        }
        if (ev.group >= groups.size()) {
            throw DomainError("scenario: events[" + std::to_string(e) + "].group out of range");
        }
        ev.law.validate();
        last = ev.time;
    }
    if (grid_step < 0.0) throw DomainError("scenario: grid_step must be nonnegative");
}

PlanResult plan_with(const Scenario& scenario, std::span<const LinearDemandParams> laws,
                     const PlannerState& start) {
    PlanOptions opts{scenario.grid_step};
    if (scenario.planner == PlannerKind::tvm) {
        return plan_tvm(scenario.schedule, laws, scenario.time_value, scenario.method, start, opts);
    }
    return plan(scenario.schedule, laws, scenario.method, start, opts);
}

namespace {

std::vector<double> prices_at(const PricingPolicy& policy, double t) {
    std::vector<double> out;
    for (std::size_t i = 0; i < policy.group_count(); ++i) out.push_back(policy.price_at(i, t));
    return out;
}

}  // namespace

SimulationResult run(const Scenario& scenario) {
    scenario.validate();
    const std::size_t k = scenario.groups.size();
    const double T = scenario.horizon();
    auto laws = scenario.initial_laws();
    std::vector<DemandModel> models;
    for (const auto& law : laws) models.emplace_back(law, T);

    SimulationResult sim;
    auto first = plan_with(scenario, laws, PlannerState::initial(k));
    sim.executed = first.policy;
    std::vector<double> initial;
    for (const auto& g : scenario.groups) initial.push_back(g.initial_price);
    sim.replans.push_back({0.0, "initial", initial, prices_at(sim.executed, 0.0)});
    std::vector<AllocationRecord> pending = first.allocations;
    int steps = static_cast<int>(first.selected.size());

    for (const auto& ev : scenario.events) {
        std::vector<AllocationRecord> later;
        for (const auto& a : pending) {
            (a.time < ev.time ? sim.allocations : later).push_back(a);
        }
        pending.clear();

        models[ev.group] = models[ev.group].with_change(ev.time, ev.law);
        laws[ev.group] = ev.law;
        std::vector<double> sold(k), revenue(k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto g = integrate_group(sim.executed, i, models[i], 0.0, ev.time);
            sold[i] = g.sales;
            revenue[i] = g.revenue;
        }
        auto state = PlannerState::at(scenario.schedule, ev.time, sold, revenue);
        state.step = steps;
        const auto old_prices = prices_at(sim.executed, ev.time);
        const std::string trigger = "demand change group " + std::to_string(ev.group);
        try {
            auto replanned = plan_with(scenario, laws, state);
            sim.executed = sim.executed.splice(replanned.policy, ev.time);
            sim.replans.push_back({ev.time, trigger, old_prices, prices_at(sim.executed, ev.time)});
            pending = replanned.allocations;
            steps += static_cast<int>(replanned.selected.size());
        } catch (const std::exception& e) {
            if (dynamic_cast<const DomainError*>(&e) != nullptr) throw;
            sim.replans.push_back({ev.time, trigger + " (replan failed)", old_prices, old_prices});
            pending = later;
            sim.infeasibility = "replan at t=" + std::to_string(ev.time) + " failed: " + e.what();
            break;
        }
    }
    sim.allocations.insert(sim.allocations.end(), pending.begin(), pending.end());

    std::vector<double> extra = scenario.schedule.times;
    for (const auto& ev : scenario.events) extra.push_back(ev.time);
    const double step = scenario.grid_step > 0.0 ? scenario.grid_step : T / 1000.0;
    const auto grid = make_grid(0.0, T, step, extra);
    sim.trajectory = integrate_policy(sim.executed, models, grid,
                                      {0.0, std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)});
    sim.final_revenue = sim.trajectory.aggregate.back();
    sim.violations = all_violations(scenario.schedule, sim.trajectory, default_tolerance(scenario.schedule));
    return sim;
}

ComparisonResult compare(const Scenario& scenario) {
    Scenario hs = scenario;
    Scenario rs = scenario;
    hs.method = DistributionMethod::headroom;
    rs.method = DistributionMethod::revenue_share;
    ComparisonResult out;
    std::exception_ptr err[2];
#pragma omp parallel sections
    {
#pragma omp section
        {
            try {
                out.headroom = run(hs);
            } catch (...) {
                err[0] = std::current_exception();
            }
        }
#pragma omp section
        {
            try {
                out.revenue_share = run(rs);
            } catch (...) {
                err[1] = std::current_exception();
            }
        }
    }
    for (auto& e : err) {
        if (e) std::rethrow_exception(e);
    }
    out.delta = out.headroom.final_revenue - out.revenue_share.final_revenue;
    const double base = out.revenue_share.final_revenue;
    out.delta_pct = base != 0.0 ? 100.0 * out.delta / base : 0.0;
    return out;
}

std::vector<DistributionRow> distribution_report(const SimulationResult& sim) {
    std::vector<DistributionRow> out;
    for (const auto& a : sim.allocations) {
        out.push_back({a.time, a.step, a.target_index, a.method, a.allocation.weights,
                       a.allocation.equal_split_fallback});
    }
    return out;
}

}  // namespace dynprice
