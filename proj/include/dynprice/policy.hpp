#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "dynprice/constraints.hpp"
#include "dynprice/demand.hpp"
#include "dynprice/time_value.hpp"

namespace dynprice {

struct ConstantPrice {
    double price = 0.0;
    friend bool operator==(const ConstantPrice&, const ConstantPrice&) = default;
};

/// Normalized price p(t) = (choke - q / zeta(t)) / 2, the stationary curve of
/// discounted revenue under linear demand with choke price a / b.
struct DiscountedLinearPrice {
    double choke = 0.0;
    double q = 0.0;
    friend bool operator==(const DiscountedLinearPrice&, const DiscountedLinearPrice&) = default;
};

using PriceCurve = std::variant<ConstantPrice, DiscountedLinearPrice>;

struct PolicySegment {
    double begin = 0.0;
    double end = 0.0;
    PriceCurve curve;
};

struct GroupPolicy {
    std::vector<PolicySegment> segments;
};

/// Per-group price trajectories. Segments of a group are contiguous and
/// ordered. Curves are evaluated against `time_value`; posted prices are
/// kappa(t) * p(t).
struct PricingPolicy {
    std::vector<GroupPolicy> groups;
    TimeValueSpec time_value;

    std::size_t group_count() const noexcept { return groups.size(); }
    double begin() const;
    double end() const;

    const PolicySegment& segment_at(std::size_t group, double t) const;
    double price_at(std::size_t group, double t) const;
    double posted_price_at(std::size_t group, double t) const;

    /// Appends a segment, merging it into the previous one when both are the
    /// same constant price or the same curve.
    void append(std::size_t group, PolicySegment segment);

    /// Interior segment boundaries of one group.
    std::vector<double> breakpoints(std::size_t group) const;

    /// This policy on [begin, t) followed by `tail` on [t, tail.end()).
    PricingPolicy splice(const PricingPolicy& tail, double t) const;
};

double evaluate(const PriceCurve& curve, const TimeValueSpec& tv, double t);

/// Cumulative state at a time.
struct CumulativeState {
    double time = 0.0;
    std::vector<double> sales;
    std::vector<double> revenue;
};

/// Sales and zeta-weighted revenue of one group over [t0, t1] under the policy
/// and realized demand. Exact on constant-price pieces, adaptive Simpson on
/// curves.
struct GroupIntegral {
    double sales = 0.0;
    double revenue = 0.0;
};
GroupIntegral integrate_group(const PricingPolicy& policy, std::size_t group,
                              const DemandModel& demand, double t0, double t1);

/// Samples cumulative sales/revenue on `grid` starting from `start`.
/// grid must be sorted with grid.front() == start.time.
Trajectory integrate_policy(const PricingPolicy& policy, std::span<const DemandModel> demand,
                            std::span<const double> grid, const CumulativeState& start);

/// Uniform grid from t0 to t1 with spacing at most `step`, merged with the
/// `extra` points that fall inside [t0, t1].
std::vector<double> make_grid(double t0, double t1, double step, std::span<const double> extra = {});

}  // namespace dynprice
