#include "dynprice/time_value.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "dynprice/errors.hpp"
#include "dynprice/numeric.hpp"

namespace dynprice {

ValueCurve ValueCurve::constant(double level) {
    if (!(level > 0.0 && std::isfinite(level))) throw DomainError("value curve: level must be positive");
    ValueCurve c;
    c.kind_ = Kind::constant;
    c.level_ = level;
    return c;
}

ValueCurve ValueCurve::exponential(double level, double rate) {
    if (!(level > 0.0 && std::isfinite(level) && std::isfinite(rate))) {
        throw DomainError("value curve: bad exponential parameters");
    }
    ValueCurve c;
    c.kind_ = Kind::exponential;
    c.level_ = level;
    c.rate_ = rate;
    return c;
}

ValueCurve ValueCurve::table(std::vector<double> times, std::vector<double> values) {
    if (times.empty() || times.size() != values.size()) {
        throw DomainError("value curve: table needs matching non-empty times/values");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(values[i] > 0.0 && std::isfinite(values[i]))) {
            throw DomainError("value curve: table values must be positive");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw DomainError("value curve: table times must increase");
        }
    }
    ValueCurve c;
    c.kind_ = Kind::table;
    c.times_ = std::move(times);
    c.values_ = std::move(values);
    return c;
}

double ValueCurve::operator()(double t) const {
    switch (kind_) {
        case Kind::constant: return level_;
        case Kind::exponential: return level_ * std::exp(rate_ * t);
        case Kind::table: {
            if (t <= times_.front()) return values_.front();
            if (t >= times_.back()) return values_.back();
            auto it = std::upper_bound(times_.begin(), times_.end(), t);
            const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
            const std::size_t lo = hi - 1;
            const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
            return values_[lo] + w * (values_[hi] - values_[lo]);
        }
    }
    return level_;
}

bool ValueCurve::monotone(int sign, double horizon) const {
    switch (kind_) {
        case Kind::constant: return true;
        case Kind::exponential: return sign * rate_ >= 0.0;
        case Kind::table: {
            for (std::size_t i = 1; i < values_.size(); ++i) {
                if (times_[i - 1] >= horizon) break;
                if (sign * (values_[i] - values_[i - 1]) < 0.0) return false;
            }
            return true;
        }
    }
    return false;
}

bool TimeValueSpec::is_neutral() const {
    auto unit = [](const ValueCurve& c) {
        switch (c.kind()) {
            case ValueCurve::Kind::constant: return c.level() == 1.0;
            case ValueCurve::Kind::exponential: return c.level() == 1.0 && c.rate() == 0.0;
            case ValueCurve::Kind::table:
                return std::all_of(c.knot_values().begin(), c.knot_values().end(),
                                   [](double v) { return v == 1.0; });
        }
        return false;
    };
    return unit(phi) && unit(kappa);
}

void TimeValueSpec::validate(double horizon) const {
    if (!(phi(0.0) > 0.0)) throw DomainError("time value: phi(0) must be positive");
    if (!phi.monotone(-1, horizon)) throw DomainError("time value: phi must be non-increasing");
    if (std::abs(kappa(0.0) - 1.0) > 1e-12) throw DomainError("time value: kappa(0) must be 1");
    if (!kappa.monotone(+1, horizon)) throw DomainError("time value: kappa must be non-decreasing");
}

namespace {

/// zeta = level * exp(rate * t) when both factors are constant/exponential.
std::optional<std::pair<double, double>> exponential_form(const TimeValueSpec& spec) {
    auto part = [](const ValueCurve& c) -> std::optional<std::pair<double, double>> {
        if (c.kind() == ValueCurve::Kind::table) return std::nullopt;
        return std::pair{c.level(), c.kind() == ValueCurve::Kind::exponential ? c.rate() : 0.0};
    };
    auto p = part(spec.phi);
    auto k = part(spec.kappa);
    if (!p || !k) return std::nullopt;
    return std::pair{p->first * k->first, p->second + k->second};
}

/// Integral of level * exp(rate * t) over [t1, t2].
double exp_integral(double level, double rate, double t1, double t2) {
    if (rate == 0.0) return level * (t2 - t1);
    // expm1 keeps precision for small rate * (t2 - t1)
    return level * std::exp(rate * t1) * std::expm1(rate * (t2 - t1)) / rate;
}

template <class F>
double piecewise_quadrature(const TimeValueSpec& spec, double t1, double t2, F&& f) {
    std::vector<double> cuts{t1, t2};
    for (const ValueCurve* c : {&spec.phi, &spec.kappa}) {
        for (double t : c->knot_times()) {
            if (t > t1 && t < t2) cuts.push_back(t);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        total += numeric::adaptive_simpson(f, cuts[i - 1], cuts[i], 1e-10);
    }
    return total;
}

}  // namespace

double inv_phi_integral(const TimeValueSpec& spec, double t1, double t2) {
    if (t1 == t2) return 0.0;
    if (t2 < t1) throw DomainError("inv_phi_integral: t1 > t2");
    if (auto e = exponential_form(spec)) return exp_integral(1.0 / e->first, -e->second, t1, t2);
    return piecewise_quadrature(spec, t1, t2, [&](double t) { return 1.0 / spec.zeta(t); });
}

double zeta_integral(const TimeValueSpec& spec, double t1, double t2) {
    if (t1 == t2) return 0.0;
    if (t2 < t1) throw DomainError("zeta_integral: t1 > t2");
    if (auto e = exponential_form(spec)) return exp_integral(e->first, e->second, t1, t2);
    return piecewise_quadrature(spec, t1, t2, [&](double t) { return spec.zeta(t); });
}

}  // namespace dynprice
