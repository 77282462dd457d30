#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace dynprice {

/// Constraint schedule on the common time points 0 = tau_0 < ... < tau_l = T.
///
///  * sales_floors[i][j]: S^i(tau_j) >= floor for 1 <= j <= l-1 (absent = none)
///  * final_sales[i]:     S^i(T) == final_sales[i]
///  * revenue_floors[j]:  R(tau_j) >= floor for 1 <= j <= l (absent = none)
///
/// Both floor tables are indexed by j and sized l+1; index 0 is never set.
struct ConstraintSchedule {
    std::vector<double> times;
    std::vector<std::vector<std::optional<double>>> sales_floors;
    std::vector<double> final_sales;
    std::vector<std::optional<double>> revenue_floors;

    /// Schedule with only final-sales constraints.
    static ConstraintSchedule with_final_sales(std::vector<double> times,
                                               std::vector<double> final_sales);

    std::size_t last_index() const noexcept { return times.empty() ? 0 : times.size() - 1; }
    double horizon() const noexcept { return times.empty() ? 0.0 : times.back(); }
    std::size_t group_count() const noexcept { return final_sales.size(); }

    /// Sales requirement for group i at index j: the floor for j < l, the final
    /// target for j == l.
    std::optional<double> sales_requirement(std::size_t group, std::size_t j) const;
    std::optional<double> revenue_floor(std::size_t j) const;

    /// Largest floor or final-sales magnitude in the schedule.
    double max_magnitude() const;
};

struct ScheduleViolation {
    std::string field;
    std::size_t index = 0;
    std::string message;
};

/// Every structural problem with the schedule. Empty means valid.
std::vector<ScheduleViolation> validate(const ConstraintSchedule& schedule);

/// Cumulative sales/revenue sampled on a time grid. aggregate[n] is the sum of
/// revenue[i][n] over groups.
struct Trajectory {
    std::vector<double> grid;
    std::vector<std::vector<double>> sales;
    std::vector<std::vector<double>> revenue;
    std::vector<double> aggregate;

    std::size_t group_count() const noexcept { return sales.size(); }

    /// Linear interpolation between grid points; exact on grid points.
    double sales_at(std::size_t group, double t) const;
    double revenue_at(std::size_t group, double t) const;
    double aggregate_at(double t) const;
};

enum class ConstraintKind { sales_floor, final_sales, revenue_floor };

const char* to_string(ConstraintKind kind);

struct FeasibilityViolation {
    ConstraintKind kind;
    std::size_t group = 0;  // unused for revenue floors
    std::size_t index = 0;
    /// Floors: required minus achieved (positive when short). Final sales:
    /// achieved minus required.
    double gap = 0.0;
};

/// Tolerance of 1e-6 relative to the largest magnitude in the schedule.
double default_tolerance(const ConstraintSchedule& schedule);

/// First violated constraint scanning j = from_index..l (sales, then final,
/// then revenue at each j), or nullopt when everything holds within `tol`.
std::optional<FeasibilityViolation> check_feasibility_against(const ConstraintSchedule& schedule,
                                                              const Trajectory& traj, double tol,
                                                              std::size_t from_index = 1);

/// Every violated constraint in the same order.
std::vector<FeasibilityViolation> all_violations(const ConstraintSchedule& schedule,
                                                 const Trajectory& traj, double tol,
                                                 std::size_t from_index = 1);

}  // namespace dynprice
