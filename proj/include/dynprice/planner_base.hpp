#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dynprice/demand.hpp"
#include "dynprice/planner.hpp"

namespace dynprice {

/// Constant price for one group that keeps every pending sales requirement
/// (intermediate floors and the final target) reachable.
struct EvenAbsorptionPrice {
    double price = 0.0;
    double rate = 0.0;
    /// Requirement that sets the rate; the price holds until times[binding_index].
    std::size_t binding_index = 0;
};

/// Step 2 of the base algorithm. The rate for each group is the largest
/// average rate demanded by any pending requirement.
/// Throws InfeasibleScenario when a required rate cannot be produced within
/// the group's price bounds.
std::vector<EvenAbsorptionPrice> even_absorption_prices(const PlannerState& state,
                                                        const ConstraintSchedule& schedule,
                                                        std::span<const LinearDemandParams> laws);

/// Piece of a sales-only projection.
struct ProjectedPiece {
    double begin = 0.0;
    double end = 0.0;
    double price = 0.0;
    double rate = 0.0;
};

/// Per-group piecewise-constant policy that meets the sales requirements only,
/// from state.time to the horizon (even absorption re-run at each binding floor).
using SalesProjection = std::vector<std::vector<ProjectedPiece>>;

SalesProjection sales_only_projection(const PlannerState& state, const ConstraintSchedule& schedule,
                                      std::span<const LinearDemandParams> laws);

/// Revenue of one group's projection over [t0, t1].
double projected_revenue(const std::vector<ProjectedPiece>& pieces, double t0, double t1);

/// Aggregate projected revenue from state.time to each tau_j (0 for j <= state.index).
std::vector<double> expected_revenue_at(const SalesProjection& projection,
                                        const ConstraintSchedule& schedule,
                                        const PlannerState& state);

/// Indices j > state.index whose revenue floor is missed by
/// state revenue + expected[j].
std::vector<std::size_t> detect_burdensome(const PlannerState& state,
                                           const ConstraintSchedule& schedule,
                                           std::span<const double> expected);

struct StringentConstraint {
    std::size_t index = 0;
    /// (R_j* - R(now)) / (tau_j* - now): aggregate revenue rate that meets it.
    double required_rate = 0.0;
};

/// Burdensome floor with the largest shortfall rate; ties go to the earliest.
StringentConstraint most_stringent(const PlannerState& state, const ConstraintSchedule& schedule,
                                   std::span<const double> expected,
                                   std::span<const std::size_t> burdensome);

/// Quasi-optimal piecewise-constant policy from `start` to the horizon.
/// Throws InfeasibleScenario / InfeasibleTarget (messages carry the step).
PlanResult plan(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                DistributionMethod method, const PlannerState& start, const PlanOptions& options = {});

PlanResult plan(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                DistributionMethod method, const PlanOptions& options = {});

namespace detail {

/// tolerance for "same time" comparisons on a horizon
inline double time_tol(double horizon) { return 1e-12 * (horizon > 1.0 ? horizon : 1.0); }

/// Grid for predicted trajectories: uniform plus every schedule time.
std::vector<double> prediction_grid(const ConstraintSchedule& schedule, double t0,
                                    const PlanOptions& options);

/// Largest revenue rate among admissible prices whose sales rate is at least
/// `min_rate`.
double attainable_revenue_rate(const LinearDemandParams& law, double min_rate);

}  // namespace detail

}  // namespace dynprice
