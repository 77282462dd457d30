#include "dynprice/policy.hpp"

#include <algorithm>
#include <cmath>

#include "dynprice/errors.hpp"
#include "dynprice/numeric.hpp"

namespace dynprice {

double evaluate(const PriceCurve& curve, const TimeValueSpec& tv, double t) {
    if (const auto* c = std::get_if<ConstantPrice>(&curve)) return c->price;
    const auto& d = std::get<DiscountedLinearPrice>(curve);
    return 0.5 * (d.choke - d.q / tv.zeta(t));
}

double PricingPolicy::begin() const {
    double b = 0.0;
    bool first = true;
    for (const auto& g : groups) {
        if (g.segments.empty()) continue;
        b = first ? g.segments.front().begin : std::min(b, g.segments.front().begin);
        first = false;
    }
    return b;
}

double PricingPolicy::end() const {
    double e = 0.0;
    for (const auto& g : groups) {
        if (!g.segments.empty()) e = std::max(e, g.segments.back().end);
    }
    return e;
}

const PolicySegment& PricingPolicy::segment_at(std::size_t group, double t) const {
    const auto& segs = groups.at(group).segments;
    if (segs.empty()) throw DomainError("policy: group has no segments");
    const double tol = 1e-12 * std::max(1.0, std::abs(segs.back().end));
    if (t < segs.front().begin - tol || t > segs.back().end + tol) {
        throw DomainError("policy: t=" + std::to_string(t) + " outside policy span");
    }
    auto it = std::upper_bound(segs.begin(), segs.end(), t,
                               [](double v, const PolicySegment& s) { return v < s.begin; });
    return it == segs.begin() ? segs.front() : *std::prev(it);
}

double PricingPolicy::price_at(std::size_t group, double t) const {
    return evaluate(segment_at(group, t).curve, time_value, t);
}

double PricingPolicy::posted_price_at(std::size_t group, double t) const {
    return time_value.kappa(t) * price_at(group, t);
}

void PricingPolicy::append(std::size_t group, PolicySegment segment) {
    if (groups.size() <= group) groups.resize(group + 1);
    auto& segs = groups[group].segments;
    if (!(segment.end > segment.begin)) return;
    if (!segs.empty()) {
        auto& last = segs.back();
        if (std::abs(last.end - segment.begin) > 1e-9 * std::max(1.0, std::abs(segment.begin))) {
            throw DomainError("policy: appended segment is not contiguous");
        }
        if (last.curve == segment.curve) {
            last.end = segment.end;
            return;
        }
        segment.begin = last.end;
    }
    segs.push_back(segment);
}

std::vector<double> PricingPolicy::breakpoints(std::size_t group) const {
    std::vector<double> out;
    const auto& segs = groups.at(group).segments;
    for (std::size_t s = 1; s < segs.size(); ++s) out.push_back(segs[s].begin);
    return out;
}

PricingPolicy PricingPolicy::splice(const PricingPolicy& tail, double t) const {
    PricingPolicy out;
    out.time_value = time_value;
    const std::size_t k = std::max(groups.size(), tail.groups.size());
    out.groups.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (i < groups.size()) {
            for (auto seg : groups[i].segments) {
                if (seg.begin >= t) break;
                seg.end = std::min(seg.end, t);
                out.append(i, seg);
            }
        }
        if (i < tail.groups.size()) {
            for (auto seg : tail.groups[i].segments) {
                if (seg.end <= t) continue;
                seg.begin = std::max(seg.begin, t);
                out.append(i, seg);
            }
        }
    }
    if (!(tail.time_value == time_value)) {
        // Mixed time-value specs cannot be represented; the tail's wins.
        out.time_value = tail.time_value;
    }
    return out;
}

GroupIntegral integrate_group(const PricingPolicy& policy, std::size_t group,
                              const DemandModel& demand, double t0, double t1) {
    GroupIntegral acc;
    if (!(t1 > t0)) return acc;
    std::vector<double> cuts{t0, t1};
    for (const auto& seg : policy.groups.at(group).segments) {
        if (seg.begin > t0 && seg.begin < t1) cuts.push_back(seg.begin);
    }
    for (const auto& ds : demand.segments()) {
        if (ds.start > t0 && ds.start < t1) cuts.push_back(ds.start);
    }
    std::sort(cuts.begin(), cuts.end());

    const auto& tv = policy.time_value;
    for (std::size_t c = 1; c < cuts.size(); ++c) {
        const double a = cuts[c - 1];
        const double b = cuts[c];
        if (!(b > a)) continue;
        const double mid = 0.5 * (a + b);
        const auto& curve = policy.segment_at(group, mid).curve;
        const auto& law = demand.law_at(mid);
        if (const auto* cp = std::get_if<ConstantPrice>(&curve)) {
            const double v = law.rate(cp->price).value;
            acc.sales += v * (b - a);
            acc.revenue += cp->price * v * zeta_integral(tv, a, b);
        } else {
            auto rate = [&](double t) { return law.rate(evaluate(curve, tv, t)).value; };
            acc.sales += numeric::adaptive_simpson(rate, a, b, 1e-11);
            acc.revenue += numeric::adaptive_simpson(
                [&](double t) {
                    const double p = evaluate(curve, tv, t);
                    return tv.zeta(t) * p * law.rate(p).value;
                },
                a, b, 1e-11);
        }
    }
    return acc;
}

Trajectory integrate_policy(const PricingPolicy& policy, std::span<const DemandModel> demand,
                            std::span<const double> grid, const CumulativeState& start) {
    const std::size_t k = policy.group_count();
    if (demand.size() != k) throw DomainError("integrate_policy: demand/group count mismatch");
    if (grid.empty()) throw DomainError("integrate_policy: empty grid");

    Trajectory traj;
    traj.grid.assign(grid.begin(), grid.end());
    traj.sales.assign(k, std::vector<double>(grid.size()));
    traj.revenue.assign(k, std::vector<double>(grid.size()));
    traj.aggregate.assign(grid.size(), 0.0);

    for (std::size_t i = 0; i < k; ++i) {
        double s = start.sales.empty() ? 0.0 : start.sales.at(i);
        double r = start.revenue.empty() ? 0.0 : start.revenue.at(i);
        traj.sales[i][0] = s;
        traj.revenue[i][0] = r;
        for (std::size_t n = 1; n < grid.size(); ++n) {
            const auto inc = integrate_group(policy, i, demand[i], grid[n - 1], grid[n]);
            s += inc.sales;
            r += inc.revenue;
            traj.sales[i][n] = s;
            traj.revenue[i][n] = r;
        }
    }
    for (std::size_t n = 0; n < grid.size(); ++n) {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += traj.revenue[i][n];
        traj.aggregate[n] = sum;
    }
    return traj;
}

std::vector<double> make_grid(double t0, double t1, double step, std::span<const double> extra) {
    if (!(t1 > t0) || !(step > 0.0)) throw DomainError("make_grid: bad range or step");
    const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / step - 1e-9));
    std::vector<double> g;
    g.reserve(n + 1 + extra.size());
    for (std::size_t i = 0; i <= n; ++i) {
        g.push_back(i == n ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n));
    }
    for (double e : extra) {
        if (e > t0 && e < t1) g.push_back(e);
    }
    std::sort(g.begin(), g.end());
    const double tol = 1e-12 * std::max(1.0, std::abs(t1));
    std::vector<double> out;
    for (double v : g) {
        if (out.empty() || v - out.back() > tol) {
            out.push_back(v);
        } else if (std::find(extra.begin(), extra.end(), v) != extra.end()) {
            out.back() = v;  // prefer the exact schedule/event time
        }
    }
    return out;
}

}  // namespace dynprice
