#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynprice/constraints.hpp"
#include "dynprice/demand.hpp"
#include "dynprice/policy.hpp"
#include "dynprice/time_value.hpp"

namespace dynprice {

/// n evenly spaced prices on [lo, hi].
struct PriceGrid {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 2;

    double step() const { return (hi - lo) / static_cast<double>(n - 1); }
    double at(std::size_t m) const;
};

/// One grid per group, shared by all of that group's segments.
struct GridSpec {
    std::vector<PriceGrid> groups;
    std::uint64_t budget = 50'000'000;
    /// Per-group final-sales band. Empty selects s * b * step * T.
    std::vector<double> sales_band;
};

/// Grid of n points on [price_lo, min(price_hi, choke)] for each group.
GridSpec default_grid(std::span<const LinearDemandParams> laws, std::size_t n,
                      std::uint64_t budget = 50'000'000);

/// Number of policies the grid enumerates (saturates at UINT64_MAX).
std::uint64_t enumeration_size(const GridSpec& grid, std::size_t segments);

struct OracleResult {
    PricingPolicy policy;
    /// prices[i][j-1] is group i's price on [tau_{j-1}, tau_j).
    std::vector<std::vector<double>> prices;
    double revenue = 0.0;
    std::vector<double> sales_band;
    std::uint64_t evaluated = 0;
    std::uint64_t feasible = 0;
};

/// Exhaustive search over piecewise-constant grid policies with breakpoints
/// at the schedule times. Final sales must land within the band of the
/// target, intermediate sales floors within the band below them, and revenue
/// floors are checked with the schedule's default tolerance.
/// Throws BudgetExceeded or InfeasibleScenario.
OracleResult oracle_best(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                         const GridSpec& grid, const TimeValueSpec& spec = TimeValueSpec::neutral());

/// Same search on one thread; the reference for oracle_best.
OracleResult oracle_best_serial(const ConstraintSchedule& schedule,
                                std::span<const LinearDemandParams> laws, const GridSpec& grid,
                                const TimeValueSpec& spec = TimeValueSpec::neutral());

}  // namespace dynprice
