#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace dynprice {

enum class DistributionMethod { headroom, revenue_share };

const char* to_string(DistributionMethod m);
std::optional<DistributionMethod> parse_distribution_method(std::string_view name);

/// Revenue outlook for one group over the allocation interval.
struct GroupOutlook {
    double expected = 0.0;  ///< revenue under the current (even-absorption) policy
    double maximum = 0.0;   ///< revenue at the revenue-maximizing policy
    double current = 0.0;   ///< cumulative revenue realized so far
};

struct AllocationInput {
    std::vector<GroupOutlook> groups;
    double shortfall = 0.0;  ///< aggregate revenue the floor needs beyond expectations
    double interval = 0.0;   ///< length of the allocation interval
};

struct Allocation {
    std::vector<double> weights;
    std::vector<double> shares;
    /// (expected + share) / interval per group.
    std::vector<double> target_rates;
    /// Set when revenue-share fell back to an equal split.
    bool equal_split_fallback = false;
};

/// Shares proportional to each group's headroom (maximum - expected).
/// Throws InfeasibleTarget when the shortfall exceeds the total headroom.
Allocation allocate_headroom(const AllocationInput& input);

/// Shares proportional to each group's realized revenue, normalized over
/// groups. Falls back to an equal split when no revenue has been realized.
Allocation allocate_revenue_share(const AllocationInput& input);

Allocation allocate(DistributionMethod method, const AllocationInput& input);

}  // namespace dynprice
