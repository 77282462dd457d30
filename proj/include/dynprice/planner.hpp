#pragma once

#include <cstddef>
#include <vector>

#include "dynprice/constraints.hpp"
#include "dynprice/distribution.hpp"
#include "dynprice/policy.hpp"

namespace dynprice {

/// Where a planning pass starts: time, last schedule index reached, and the
/// realized per-group cumulative sales and (zeta-weighted) revenue.
struct PlannerState {
    int step = 0;
    double time = 0.0;
    std::size_t index = 0;
    std::vector<double> sold;
    std::vector<double> revenue;

    static PlannerState initial(std::size_t groups);

    /// State at an arbitrary time: `index` becomes the last tau_j <= time.
    static PlannerState at(const ConstraintSchedule& schedule, double time,
                           std::vector<double> sold, std::vector<double> revenue);

    double aggregate_revenue() const;
};

/// One invocation of the distribution heuristic.
struct AllocationRecord {
    int step = 0;
    double time = 0.0;
    std::size_t target_index = 0;
    DistributionMethod method = DistributionMethod::headroom;
    Allocation allocation;
};

struct PlanOptions {
    /// Output grid spacing; 0 selects horizon / 1000.
    double grid_step = 0.0;
};

struct PlanResult {
    PricingPolicy policy;
    Trajectory predicted;
    /// Revenue floors the planner targeted, in order (each met with equality).
    std::vector<std::size_t> selected;
    std::vector<AllocationRecord> allocations;
};

}  // namespace dynprice
