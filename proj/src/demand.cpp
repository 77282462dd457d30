#include "dynprice/demand.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynprice/errors.hpp"

namespace dynprice {

namespace {

constexpr double kRelEps = 1e-12;

bool within(double x, double lo, double hi, double tol) {
    return x >= lo - tol && x <= hi + tol;
}

}  // namespace

void LinearDemandParams::validate() const {
    if (!(std::isfinite(a) && a > 0.0)) throw DomainError("demand: a must be positive");
    if (!(std::isfinite(b) && b > 0.0)) throw DomainError("demand: b must be positive");
    if (!(std::isfinite(scale) && scale >= 0.0)) throw DomainError("demand: scale must be >= 0");
    if (!(cap > 0.0)) throw DomainError("demand: cap must be positive");
    if (!(price_lo >= 0.0 && price_lo < price_hi)) {
        throw DomainError("demand: need 0 <= price_lo < price_hi");
    }
}

Rate LinearDemandParams::rate(double price) const {
    const double raw = scale * (a - b * price);
    return {std::clamp(raw, 0.0, cap)};
}

double LinearDemandParams::kink_price() const {
    if (!std::isfinite(cap) || scale == 0.0) return 0.0;
    return std::max(0.0, (a - cap / scale) / b);
}

double LinearDemandParams::max_branch_rate() const { return std::min(cap, scale * a); }

bool LinearDemandParams::on_linear_branch(double price, double tol) const {
    const double raw = scale * (a - b * price);
    const double rtol = tol * std::max(1.0, scale * a);
    return price >= -tol && raw >= -rtol && raw <= cap + rtol;
}

double LinearDemandParams::invert(Rate r) const {
    const double top = max_branch_rate();
    const double slack = kRelEps * std::max(1.0, top);
    if (r.value < -slack || r.value > top + slack) {
        throw InfeasibleRate("demand: rate " + std::to_string(r.value) +
                                 " not attainable (max " + std::to_string(top) + ")",
                             r.value, top);
    }
    if (scale == 0.0) return choke_price();
    const double v = std::clamp(r.value, 0.0, top);
    return (a - v / scale) / b;
}

double LinearDemandParams::revenue_max_price() const {
    // p * rate(p) rises linearly while the cap binds, then is a concave parabola
    // peaking at a / 2b, so the maximizer is the later of the two.
    const double interior = std::max(0.5 * a / b, kink_price());
    return std::clamp(interior, price_lo, price_hi);
}

double LinearDemandParams::price_for_revenue_rate(double c, double p_ref) const {
    const double p_star = revenue_max_price();
    const double top = p_star * rate(p_star).value;
    const double slack = kRelEps * std::max(1.0, top);
    if (c > top + slack) {
        throw InfeasibleTarget("demand: revenue rate " + std::to_string(c) +
                                   " exceeds maximum " + std::to_string(top),
                               c - top);
    }
    if (c >= top - slack) return p_star;  // tangent

    std::vector<double> roots;
    const double kink = kink_price();
    const double choke = choke_price();
    const double ptol = 1e-12 * std::max(1.0, choke);
    if (c <= 0.0) {
        roots.push_back(choke);
        if (kink == 0.0) roots.push_back(0.0);
    } else {
        if (std::isfinite(cap) && scale > 0.0) {
            const double p = c / cap;
            if (p <= kink + ptol) roots.push_back(p);
        }
        if (scale > 0.0) {
            const double disc = a * a - 4.0 * b * c / scale;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                for (double p : {(a - sq) / (2.0 * b), (a + sq) / (2.0 * b)}) {
                    if (within(p, kink, choke, ptol)) roots.push_back(p);
                }
            }
        }
    }

    const double btol = 1e-12 * std::max(1.0, choke);
    std::erase_if(roots, [&](double p) { return !within(p, price_lo, price_hi, btol); });
    if (roots.empty()) {
        const double at_lo = price_lo * rate(price_lo).value;
        const double at_hi = std::isfinite(price_hi) ? price_hi * rate(price_hi).value : 0.0;
        throw InfeasibleTarget("demand: revenue rate " + std::to_string(c) +
                                   " not reachable within price bounds",
                               c - std::min(at_lo, at_hi));
    }
    std::sort(roots.begin(), roots.end());
    double best = roots.front();
    for (double p : roots) {
        if (std::abs(p - p_ref) < std::abs(best - p_ref)) best = p;
    }
    return std::clamp(best, price_lo, price_hi);
}

DemandModel::DemandModel(LinearDemandParams law, double horizon)
    : DemandModel(std::vector<DemandSegment>{{0.0, law}}, horizon) {}

DemandModel::DemandModel(std::vector<DemandSegment> segments, double horizon)
    : segments_(std::move(segments)), horizon_(horizon) {
    if (!(horizon_ > 0.0 && std::isfinite(horizon_))) {
        throw DomainError("demand model: horizon must be positive");
    }
    if (segments_.empty() || segments_.front().start != 0.0) {
        throw DomainError("demand model: first segment must start at 0");
    }
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        segments_[i].law.validate();
        if (i > 0 && !(segments_[i].start > segments_[i - 1].start)) {
            throw DomainError("demand model: segment starts must increase");
        }
        if (segments_[i].start > horizon_) {
            throw DomainError("demand model: segment starts after horizon");
        }
    }
}

const LinearDemandParams& DemandModel::law_at(double t) const {
    const double tol = kRelEps * horizon_;
    if (!(t >= -tol && t <= horizon_ + tol)) {
        throw DomainError("demand model: t=" + std::to_string(t) + " outside [0, " +
                          std::to_string(horizon_) + "]");
    }
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const DemandSegment& s) { return v < s.start; });
    return it == segments_.begin() ? segments_.front().law : std::prev(it)->law;
}

DemandModel DemandModel::with_change(double t, const LinearDemandParams& law) const {
    std::vector<DemandSegment> next;
    for (const auto& s : segments_) {
        if (s.start < t) next.push_back(s);
    }
    next.push_back({t, law});
    return DemandModel(std::move(next), horizon_);
}

Rate eval(const DemandModel& model, double t, double price) {
    return model.law_at(t).rate(price);
}

double invert_rate(const DemandModel& model, double t, Rate r) {
    return model.law_at(t).invert(r);
}

double revenue_max_price(const DemandModel& model, double t) {
    return model.law_at(t).revenue_max_price();
}

double solve_price_for_revenue_rate(const DemandModel& model, double t, double c, double p_ref) {
    return model.law_at(t).price_for_revenue_rate(c, p_ref);
}

}  // namespace dynprice
