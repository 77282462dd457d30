#pragma once

#include <vector>

namespace dynprice {

/// Positive scalar function of time: a constant, level * exp(rate * t), or a
/// piecewise-linear table (flat outside its knots).
class ValueCurve {
public:
    enum class Kind { constant, exponential, table };

    static ValueCurve constant(double level);
    static ValueCurve exponential(double level, double rate);
    static ValueCurve table(std::vector<double> times, std::vector<double> values);

    Kind kind() const noexcept { return kind_; }
    double level() const noexcept { return level_; }
    double rate() const noexcept { return rate_; }
    const std::vector<double>& knot_times() const noexcept { return times_; }
    const std::vector<double>& knot_values() const noexcept { return values_; }

    double operator()(double t) const;

    /// True if the curve is non-increasing (sign < 0) or non-decreasing
    /// (sign > 0) on [0, horizon].
    bool monotone(int sign, double horizon) const;

    friend bool operator==(const ValueCurve&, const ValueCurve&) = default;

private:
    ValueCurve() = default;

    Kind kind_ = Kind::constant;
    double level_ = 1.0;
    double rate_ = 0.0;
    std::vector<double> times_;
    std::vector<double> values_;
};

/// Time value of money phi (non-increasing) and construction-progress uplift
/// kappa (non-decreasing, kappa(0) = 1). Revenue is weighted by the
/// generalized value zeta = phi * kappa.
struct TimeValueSpec {
    ValueCurve phi = ValueCurve::constant(1.0);
    ValueCurve kappa = ValueCurve::constant(1.0);

    static TimeValueSpec neutral() { return {}; }

    double zeta(double t) const { return phi(t) * kappa(t); }

    /// phi == kappa == 1 everywhere.
    bool is_neutral() const;

    /// Throws DomainError if the monotonicity/positivity requirements fail.
    void validate(double horizon) const;

    friend bool operator==(const TimeValueSpec&, const TimeValueSpec&) = default;
};

/// Integral of 1 / zeta over [t1, t2]. Closed form when phi and kappa are both
/// constant or exponential, adaptive Simpson (1e-9 relative) otherwise.
double inv_phi_integral(const TimeValueSpec& spec, double t1, double t2);

/// Integral of zeta over [t1, t2], same evaluation strategy.
double zeta_integral(const TimeValueSpec& spec, double t1, double t2);

}  // namespace dynprice
