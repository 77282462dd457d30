#include "dynprice/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dynprice/errors.hpp"

namespace dynprice {

double PriceGrid::at(std::size_t m) const {
    if (m + 1 == n) return hi;
    return lo + (hi - lo) * static_cast<double>(m) / static_cast<double>(n - 1);
}

GridSpec default_grid(std::span<const LinearDemandParams> laws, std::size_t n, std::uint64_t budget) {
    GridSpec g;
    g.budget = budget;
    for (const auto& law : laws) {
        g.groups.push_back({law.price_lo, std::min(law.price_hi, law.choke_price()), n});
    }
    return g;
}

std::uint64_t enumeration_size(const GridSpec& grid, std::size_t segments) {
    constexpr auto top = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t total = 1;
    for (const auto& g : grid.groups) {
        for (std::size_t j = 0; j < segments; ++j) {
            if (g.n != 0 && total > top / g.n) return top;
            total *= g.n;
        }
    }
    return total;
}

namespace {

struct Tables {
    std::size_t k = 0;
    std::size_t l = 0;
    std::size_t digits = 0;
    std::vector<std::size_t> radix;  // per digit
    // sales/revenue indexed [digit][m]
    std::vector<std::vector<double>> sales;
    std::vector<std::vector<double>> revenue;
    std::vector<double> band;
    double rev_tol = 0.0;
};

struct Best {
    bool found = false;
    double revenue = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> digits;
    std::uint64_t evaluated = 0;
    std::uint64_t feasible = 0;

    void offer(double r, const std::vector<std::size_t>& d) {
        ++feasible;
        // lexicographic scan order: strict improvement keeps the smallest vector
        if (!found || r > revenue) {
            found = true;
            revenue = r;
            digits = d;
        }
    }

    void merge(const Best& other) {
        evaluated += other.evaluated;
        feasible += other.feasible;
        if (!other.found) return;
        if (!found || other.revenue > revenue ||
            (other.revenue == revenue && other.digits < digits)) {
            found = true;
            revenue = other.revenue;
            digits = other.digits;
        }
    }
};

Tables build_tables(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                    const GridSpec& grid, const TimeValueSpec& spec) {
    if (auto v = validate(schedule); !v.empty()) {
        throw DomainError("oracle: invalid schedule: " + v.front().message);
    }
    Tables t;
    t.k = laws.size();
    t.l = schedule.last_index();
    if (schedule.group_count() != t.k || grid.groups.size() != t.k) {
        throw DomainError("oracle: group count mismatch between schedule, demand and grid");
    }
    for (const auto& law : laws) law.validate();
    spec.validate(schedule.horizon());
    const std::uint64_t need = enumeration_size(grid, t.l);
    if (need > grid.budget) {
        throw BudgetExceeded("oracle: enumeration needs " + std::to_string(need) +
                                 " policies, budget is " + std::to_string(grid.budget),
                             need);
    }
    if (!grid.sales_band.empty() && grid.sales_band.size() != t.k) {
        throw DomainError("oracle: sales_band must have one entry per group");
    }

    const double T = schedule.horizon();
    t.digits = t.k * t.l;
    t.sales.resize(t.digits);
    t.revenue.resize(t.digits);
    for (std::size_t i = 0; i < t.k; ++i) {
        const auto& g = grid.groups[i];
        if (g.n < 2 || !(g.hi > g.lo)) throw DomainError("oracle: each grid needs n >= 2 and hi > lo");
        t.band.push_back(grid.sales_band.empty() ? laws[i].scale * laws[i].b * g.step() * T
                                                 : grid.sales_band[i]);
        for (std::size_t j = 1; j <= t.l; ++j) {
            const std::size_t d = i * t.l + (j - 1);
            const double t0 = schedule.times[j - 1];
            const double t1 = schedule.times[j];
            const double Z = zeta_integral(spec, t0, t1);
            t.radix.push_back(g.n);
            for (std::size_t m = 0; m < g.n; ++m) {
                const double p = g.at(m);
                const double v = laws[i].rate(p).value;
                t.sales[d].push_back(v * (t1 - t0));
                t.revenue[d].push_back(p * v * Z);
            }
        }
    }
    t.rev_tol = default_tolerance(schedule);
    return t;
}

/// Evaluates one digit vector; returns aggregate revenue or NaN if infeasible.
double evaluate_digits(const Tables& t, const ConstraintSchedule& schedule,
                       const std::vector<std::size_t>& d, std::vector<double>& cum_rev) {
    std::fill(cum_rev.begin(), cum_rev.end(), 0.0);
    for (std::size_t i = 0; i < t.k; ++i) {
        double sold = 0.0;
        double rev = 0.0;
        for (std::size_t j = 1; j <= t.l; ++j) {
            const std::size_t idx = i * t.l + (j - 1);
            sold += t.sales[idx][d[idx]];
            rev += t.revenue[idx][d[idx]];
            cum_rev[j] += rev;
            if (j < t.l) {
                const auto floor = schedule.sales_floors.empty() ? std::nullopt
                                                                 : schedule.sales_floors[i][j];
                if (floor && sold < *floor - t.band[i]) return std::nan("");
            } else if (std::abs(sold - schedule.final_sales[i]) > t.band[i]) {
                return std::nan("");
            }
        }
    }
    for (std::size_t j = 1; j <= t.l; ++j) {
        const auto floor = schedule.revenue_floor(j);
        if (floor && cum_rev[j] < *floor - t.rev_tol) return std::nan("");
    }
    return cum_rev[t.l];
}

/// Scans every digit vector whose leading digit is `first`.
Best scan(const Tables& t, const ConstraintSchedule& schedule, std::size_t first) {
    Best best;
    std::vector<std::size_t> d(t.digits, 0);
    std::vector<double> cum_rev(t.l + 1, 0.0);
    d[0] = first;
    while (true) {
        ++best.evaluated;
        const double r = evaluate_digits(t, schedule, d, cum_rev);
        if (!std::isnan(r)) best.offer(r, d);
        std::size_t pos = t.digits;
        while (pos > 1) {
            --pos;
            if (++d[pos] < t.radix[pos]) break;
            d[pos] = 0;
            if (pos == 1) return best;
        }
        if (t.digits == 1) return best;
    }
}

OracleResult finish(const Tables& t, const ConstraintSchedule& schedule, const GridSpec& grid,
                    const TimeValueSpec& spec, const Best& best) {
    if (!best.found) {
        throw InfeasibleScenario("oracle: no grid policy satisfies the constraints (" +
                                 std::to_string(best.evaluated) + " evaluated)");
    }
    OracleResult out;
    out.revenue = best.revenue;
    out.sales_band = t.band;
    out.evaluated = best.evaluated;
    out.feasible = best.feasible;
    out.policy.time_value = spec;
    out.policy.groups.resize(t.k);
    out.prices.resize(t.k);
    for (std::size_t i = 0; i < t.k; ++i) {
        for (std::size_t j = 1; j <= t.l; ++j) {
            const double p = grid.groups[i].at(best.digits[i * t.l + (j - 1)]);
            out.prices[i].push_back(p);
            out.policy.append(i, {schedule.times[j - 1], schedule.times[j], ConstantPrice{p}});
        }
    }
    return out;
}

}  // namespace

OracleResult oracle_best_serial(const ConstraintSchedule& schedule,
                                std::span<const LinearDemandParams> laws, const GridSpec& grid,
                                const TimeValueSpec& spec) {
    const Tables t = build_tables(schedule, laws, grid, spec);
    Best best;
    for (std::size_t m = 0; m < t.radix[0]; ++m) best.merge(scan(t, schedule, m));
    return finish(t, schedule, grid, spec, best);
}

OracleResult oracle_best(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                         const GridSpec& grid, const TimeValueSpec& spec) {
    const Tables t = build_tables(schedule, laws, grid, spec);
    const auto n0 = static_cast<long>(t.radix[0]);
    std::vector<Best> partial(t.radix[0]);
#pragma omp parallel for schedule(dynamic, 1)
    for (long m = 0; m < n0; ++m) {
        partial[static_cast<std::size_t>(m)] = scan(t, schedule, static_cast<std::size_t>(m));
    }
    Best best;
    for (const auto& p : partial) best.merge(p);
    return finish(t, schedule, grid, spec, best);
}

}  // namespace dynprice
