#include "dynprice/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynprice/errors.hpp"

namespace dynprice {

const char* to_string(DistributionMethod m) {
    switch (m) {
        case DistributionMethod::headroom: return "headroom";
        case DistributionMethod::revenue_share: return "revshare";
    }
    return "unknown";
}

std::optional<DistributionMethod> parse_distribution_method(std::string_view name) {
    if (name == "headroom") return DistributionMethod::headroom;
    if (name == "revshare") return DistributionMethod::revenue_share;
    return std::nullopt;
}

namespace {

void check_input(const AllocationInput& in) {
    if (in.groups.empty()) throw DomainError("allocation: no groups");
    if (!(in.interval > 0.0)) throw DomainError("allocation: interval must be positive");
    if (!(in.shortfall >= 0.0)) throw DomainError("allocation: negative shortfall");
}

Allocation finish(const AllocationInput& in, std::vector<double> weights) {
    Allocation out;
    out.weights = std::move(weights);
    out.shares.resize(in.groups.size());
    out.target_rates.resize(in.groups.size());
    for (std::size_t i = 0; i < in.groups.size(); ++i) {
        out.shares[i] = out.weights[i] * in.shortfall;
        out.target_rates[i] = (in.groups[i].expected + out.shares[i]) / in.interval;
    }
    return out;
}

}  // namespace

Allocation allocate_headroom(const AllocationInput& in) {
    check_input(in);
    std::vector<double> room(in.groups.size());
    double total = 0.0;
    for (std::size_t i = 0; i < in.groups.size(); ++i) {
        room[i] = std::max(0.0, in.groups[i].maximum - in.groups[i].expected);
        total += room[i];
    }
    const double slack = 1e-12 * std::max(1.0, total);
    if (in.shortfall > total + slack) {
        throw InfeasibleTarget("allocation: shortfall " + std::to_string(in.shortfall) +
                                   " exceeds total headroom " + std::to_string(total),
                               in.shortfall - total);
    }
    if (total <= 0.0) {
        // Zero shortfall with zero headroom: nothing to move.
        return finish(in, std::vector<double>(in.groups.size(), 1.0 / in.groups.size()));
    }
    for (double& r : room) r /= total;
    return finish(in, std::move(room));
}

Allocation allocate_revenue_share(const AllocationInput& in) {
    check_input(in);
    std::vector<double> w(in.groups.size());
    double total = 0.0;
    for (std::size_t i = 0; i < in.groups.size(); ++i) {
        w[i] = std::max(0.0, in.groups[i].current);
        total += w[i];
    }
    if (total <= 0.0) {
        auto out = finish(in, std::vector<double>(in.groups.size(), 1.0 / in.groups.size()));
        out.equal_split_fallback = true;
        return out;
    }
    for (double& x : w) x /= total;
    return finish(in, std::move(w));
}

Allocation allocate(DistributionMethod method, const AllocationInput& input) {
    switch (method) {
        case DistributionMethod::headroom: return allocate_headroom(input);
        case DistributionMethod::revenue_share: return allocate_revenue_share(input);
    }
    throw DomainError("allocation: unknown method");
}

}  // namespace dynprice
