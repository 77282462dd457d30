#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dynprice/constraints.hpp"
#include "dynprice/demand.hpp"
#include "dynprice/distribution.hpp"
#include "dynprice/planner.hpp"
#include "dynprice/policy.hpp"
#include "dynprice/time_value.hpp"

namespace dynprice {

enum class PlannerKind { base, tvm };

const char* to_string(PlannerKind kind);
std::optional<PlannerKind> parse_planner_kind(std::string_view name);

struct GroupSpec {
    std::string name;
    LinearDemandParams demand;
    double initial_price = 0.0;
};

/// Step change of one group's demand law at `time`.
struct DemandEvent {
    double time = 0.0;
    std::size_t group = 0;
    LinearDemandParams law;
};

struct Scenario {
    std::string name;
    std::vector<GroupSpec> groups;
    ConstraintSchedule schedule;
    TimeValueSpec time_value;
    std::vector<DemandEvent> events;
    PlannerKind planner = PlannerKind::base;
    DistributionMethod method = DistributionMethod::headroom;
    /// Output grid spacing; 0 selects horizon / 1000.
    double grid_step = 0.0;

    double horizon() const { return schedule.horizon(); }
    std::vector<LinearDemandParams> initial_laws() const;

    /// Throws DomainError describing the first problem found.
    void validate() const;
};

/// Runs the scenario's planner from `start` against static laws.
PlanResult plan_with(const Scenario& scenario, std::span<const LinearDemandParams> laws,
                     const PlannerState& start);

struct ReplanRecord {
    double time = 0.0;
    std::string trigger;
    std::vector<double> old_prices;
    std::vector<double> new_prices;
};

struct SimulationResult {
    Trajectory trajectory;
    PricingPolicy executed;
    std::vector<ReplanRecord> replans;
    /// Distribution invocations whose segment was actually executed.
    std::vector<AllocationRecord> allocations;
    double final_revenue = 0.0;
    std::vector<FeasibilityViolation> violations;
    /// Set when a replan failed; the stale policy kept running.
    std::optional<std::string> infeasibility;

    bool feasible() const { return !infeasibility && violations.empty(); }
};

/// Plans at t = 0, then at each event swaps the group's demand law from the
/// event time onwards and replans from the realized state. Initial planning
/// failures propagate; replan failures are reported in the result.
SimulationResult run(const Scenario& scenario);

struct ComparisonResult {
    SimulationResult headroom;
    SimulationResult revenue_share;
    /// headroom minus revenue-share final revenue.
    double delta = 0.0;
    /// delta as a percentage of the revenue-share final revenue.
    double delta_pct = 0.0;
};

/// Runs the scenario once per distribution method (concurrently).
ComparisonResult compare(const Scenario& scenario);

struct DistributionRow {
    double time = 0.0;
    int step = 0;
    std::size_t target_index = 0;
    DistributionMethod method = DistributionMethod::headroom;
    std::vector<double> weights;
    bool equal_split_fallback = false;
};

std::vector<DistributionRow> distribution_report(const SimulationResult& sim);

}  // namespace dynprice
