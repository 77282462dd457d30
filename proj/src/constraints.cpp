#include "dynprice/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "dynprice/errors.hpp"

namespace dynprice {

ConstraintSchedule ConstraintSchedule::with_final_sales(std::vector<double> times,
                                                        std::vector<double> final_sales) {
    ConstraintSchedule s;
    const std::size_t n = times.size();
    s.times = std::move(times);
    s.sales_floors.assign(final_sales.size(), std::vector<std::optional<double>>(n));
    s.final_sales = std::move(final_sales);
    s.revenue_floors.assign(n, std::nullopt);
    return s;
}

std::optional<double> ConstraintSchedule::sales_requirement(std::size_t group,
                                                            std::size_t j) const {
    if (j == last_index()) return final_sales.at(group);
    if (j == 0 || group >= sales_floors.size() || j >= sales_floors[group].size()) {
        return std::nullopt;
    }
    return sales_floors[group][j];
}

std::optional<double> ConstraintSchedule::revenue_floor(std::size_t j) const {
    if (j == 0 || j >= revenue_floors.size()) return std::nullopt;
    return revenue_floors[j];
}

double ConstraintSchedule::max_magnitude() const {
    double m = 0.0;
    for (double s : final_sales) m = std::max(m, std::abs(s));
    for (const auto& row : sales_floors) {
        for (const auto& f : row) {
            if (f) m = std::max(m, std::abs(*f));
        }
    }
    for (const auto& f : revenue_floors) {
        if (f) m = std::max(m, std::abs(*f));
    }
    return m;
}

std::vector<ScheduleViolation> validate(const ConstraintSchedule& schedule) {
    std::vector<ScheduleViolation> out;
    auto report = [&](std::string field, std::size_t index, std::string msg) {
        out.push_back({std::move(field), index, std::move(msg)});
    };

    const auto& t = schedule.times;
    const std::size_t n = t.size();
    if (n < 2) {
        report("times", 0, "need at least two time points");
        return out;
    }
    if (t.front() != 0.0) report("times", 0, "first time must be 0");
    for (std::size_t j = 1; j < n; ++j) {
        if (!(t[j] > t[j - 1])) {
            report("times", j, "non-increasing times at j=" + std::to_string(j));
        }
    }
    const std::size_t l = n - 1;
    const std::size_t k = schedule.group_count();
    if (k == 0) report("final_sales", 0, "no pricing groups");

    if (schedule.revenue_floors.size() != n) {
        report("revenue_floors", 0, "expected " + std::to_string(n) + " entries");
    } else {
        if (schedule.revenue_floors[0]) report("revenue_floors", 0, "index 0 must be absent");
        for (std::size_t j = 1; j < n; ++j) {
            const auto& f = schedule.revenue_floors[j];
            if (f && !(*f >= 0.0)) {
                report("revenue_floors", j, "negative revenue floor at j=" + std::to_string(j));
            }
        }
    }

    if (schedule.sales_floors.size() != k) {
        report("sales_floors", 0, "expected one row per group");
        return out;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const double fin = schedule.final_sales[i];
        const std::string field = "sales_floors[" + std::to_string(i) + "]";
        if (!(fin >= 0.0)) report("final_sales", i, "negative final sales for group " + std::to_string(i));
        const auto& row = schedule.sales_floors[i];
        if (row.size() != n) {
            report(field, 0, "expected " + std::to_string(n) + " entries");
            continue;
        }
        if (row[0]) report(field, 0, "index 0 must be absent");
        if (row[l]) report(field, l, "index l is the final-sales target; set final_sales instead");
        std::optional<double> prev;
        for (std::size_t j = 1; j < l; ++j) {
            if (!row[j]) continue;
            const double v = *row[j];
            if (!(v >= 0.0)) report(field, j, "negative sales floor at j=" + std::to_string(j));
            if (prev && v < *prev) report(field, j, "decreasing sales floors at j=" + std::to_string(j));
            if (v > fin) report(field, j, "intermediate exceeds final at j=" + std::to_string(j));
            prev = v;
        }
    }
    return out;
}

namespace {

double interpolate(const std::vector<double>& grid, const std::vector<double>& values, double t) {
    if (grid.empty()) throw DomainError("trajectory: empty grid");
    const double span = grid.back() - grid.front();
    const double tol = 1e-12 * std::max(1.0, span);
    if (t < grid.front() - tol || t > grid.back() + tol) {
        throw DomainError("trajectory: t=" + std::to_string(t) + " outside grid");
    }
    auto it = std::lower_bound(grid.begin(), grid.end(), t - tol);
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    if (hi >= grid.size()) return values.back();
    if (std::abs(grid[hi] - t) <= tol || hi == 0) return values[hi];
    const std::size_t lo = hi - 1;
    const double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
}

}  // namespace

double Trajectory::sales_at(std::size_t group, double t) const {
    return interpolate(grid, sales.at(group), t);
}

double Trajectory::revenue_at(std::size_t group, double t) const {
    return interpolate(grid, revenue.at(group), t);
}

double Trajectory::aggregate_at(double t) const { return interpolate(grid, aggregate, t); }

const char* to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::sales_floor: return "sales_floor";
        case ConstraintKind::final_sales: return "final_sales";
        case ConstraintKind::revenue_floor: return "revenue_floor";
    }
    return "unknown";
}

double default_tolerance(const ConstraintSchedule& schedule) {
    return 1e-6 * std::max(1.0, schedule.max_magnitude());
}

std::vector<FeasibilityViolation> all_violations(const ConstraintSchedule& schedule,
                                                 const Trajectory& traj, double tol,
                                                 std::size_t from_index) {
    std::vector<FeasibilityViolation> out;
    const std::size_t l = schedule.last_index();
    const std::size_t k = schedule.group_count();
    for (std::size_t j = std::max<std::size_t>(from_index, 1); j <= l; ++j) {
        const double tj = schedule.times[j];
        for (std::size_t i = 0; i < k; ++i) {
            const double sold = traj.sales_at(i, tj);
            if (j < l) {
                if (auto f = schedule.sales_requirement(i, j); f && sold < *f - tol) {
                    out.push_back({ConstraintKind::sales_floor, i, j, *f - sold});
                }
            } else if (std::abs(sold - schedule.final_sales[i]) > tol) {
                out.push_back({ConstraintKind::final_sales, i, j, sold - schedule.final_sales[i]});
            }
        }
        if (auto f = schedule.revenue_floor(j)) {
            const double r = traj.aggregate_at(tj);
            if (r < *f - tol) out.push_back({ConstraintKind::revenue_floor, 0, j, *f - r});
        }
    }
    return out;
}

std::optional<FeasibilityViolation> check_feasibility_against(const ConstraintSchedule& schedule,
                                                              const Trajectory& traj, double tol,
                                                              std::size_t from_index) {
    auto all = all_violations(schedule, traj, tol, from_index);
    if (all.empty()) return std::nullopt;
    return all.front();
}

}  // namespace dynprice
