#pragma once

#include <limits>
#include <span>
#include <vector>

namespace dynprice {

/// Sales per unit time. Always nonnegative.
struct Rate {
    double value = 0.0;
};

/// Clipped linear demand law:
///
///     rate(p) = clamp(scale * (a - b * p), 0, cap)
///
/// with admissible prices [price_lo, price_hi]. The "linear branch" is the set
/// of nonnegative prices where the clamp is inactive; `invert` and the
/// discounted closed forms live on it.
struct LinearDemandParams {
    double a = 0.0;
    double b = 1.0;
    double scale = 1.0;
    double cap = std::numeric_limits<double>::infinity();
    double price_lo = 0.0;
    double price_hi = std::numeric_limits<double>::infinity();

    /// Throws DomainError unless a > 0, b > 0, scale >= 0, cap > 0 and
    /// 0 <= price_lo < price_hi.
    void validate() const;

    Rate rate(double price) const;

    /// Price where the unclamped rate reaches zero.
    double choke_price() const { return a / b; }

    /// Price below which the cap binds; 0 when the cap never binds on p >= 0.
    double kink_price() const;

    /// Largest rate reachable on the linear branch with p >= 0.
    double max_branch_rate() const;

    /// Effective slope of the linear branch, d rate / d p = -scale * b.
    double branch_slope() const { return -scale * b; }

    /// True when `price` lies on the linear branch (within tolerance).
    bool on_linear_branch(double price, double tol = 1e-9) const;

    /// Price on the linear branch producing `r`. Ignores price bounds.
    /// Throws InfeasibleRate if r < 0 or r exceeds max_branch_rate().
    double invert(Rate r) const;

    /// Maximizer of p * rate(p) over [price_lo, price_hi].
    double revenue_max_price() const;

    double max_revenue_rate() const { return revenue_max_price() * rate(revenue_max_price()).value; }

    /// Solves p * rate(p) = c over the admissible prices. With two roots the one
    /// closest to `p_ref` wins; an exact tie goes to the lower price.
    /// Throws InfeasibleTarget when c exceeds max_revenue_rate() (shortfall is
    /// the excess) or when no admissible price reaches c.
    double price_for_revenue_rate(double c, double p_ref) const;

    friend bool operator==(const LinearDemandParams&, const LinearDemandParams&) = default;
};

struct DemandSegment {
    double start = 0.0;
    LinearDemandParams law;
};

/// Piecewise-in-time demand for one pricing group. Segment i is active on
/// [start_i, start_{i+1}); the last one runs to the horizon.
class DemandModel {
public:
    DemandModel(LinearDemandParams law, double horizon);
    DemandModel(std::vector<DemandSegment> segments, double horizon);

    double horizon() const noexcept { return horizon_; }
    std::span<const DemandSegment> segments() const noexcept { return segments_; }

    /// Law active at time t. Throws DomainError outside [0, horizon].
    const LinearDemandParams& law_at(double t) const;

    /// Copy with the law replaced from time `t` onwards.
    DemandModel with_change(double t, const LinearDemandParams& law) const;

private:
    std::vector<DemandSegment> segments_;
    double horizon_;
};

Rate eval(const DemandModel& model, double t, double price);
double invert_rate(const DemandModel& model, double t, Rate r);
double revenue_max_price(const DemandModel& model, double t);
double solve_price_for_revenue_rate(const DemandModel& model, double t, double c, double p_ref);

}  // namespace dynprice
