#include "dynprice/planner_base.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dynprice/errors.hpp"

namespace dynprice {

PlannerState PlannerState::initial(std::size_t groups) {
    PlannerState s;
    s.sold.assign(groups, 0.0);
    s.revenue.assign(groups, 0.0);
    return s;
}

PlannerState PlannerState::at(const ConstraintSchedule& schedule, double time,
                              std::vector<double> sold, std::vector<double> revenue) {
    PlannerState s;
    s.time = time;
    s.sold = std::move(sold);
    s.revenue = std::move(revenue);
    const double tol = detail::time_tol(schedule.horizon());
    for (std::size_t j = 0; j < schedule.times.size(); ++j) {
        if (schedule.times[j] <= time + tol) s.index = j;
    }
    if (std::abs(schedule.times[s.index] - time) <= tol) s.time = schedule.times[s.index];
    return s;
}

double PlannerState::aggregate_revenue() const {
    return std::accumulate(revenue.begin(), revenue.end(), 0.0);
}

namespace detail {

std::vector<double> prediction_grid(const ConstraintSchedule& schedule, double t0,
                                    const PlanOptions& options) {
    const double T = schedule.horizon();
    const double step = options.grid_step > 0.0 ? options.grid_step : T / 1000.0;
    if (!(T > t0)) return {t0};
    return make_grid(t0, T, step, schedule.times);
}

double attainable_revenue_rate(const LinearDemandParams& law, double min_rate) {
    const double best = law.revenue_max_price();
    if (min_rate <= law.rate(best).value) return law.max_revenue_rate();
    if (min_rate >= law.max_branch_rate()) {
        const double p = std::max(law.price_lo, law.kink_price());
        return p * law.rate(p).value;
    }
    const double p = std::clamp(law.invert(Rate{min_rate}), law.price_lo, law.price_hi);
    return p * law.rate(p).value;
}

}  // namespace detail

namespace {

std::string step_prefix(int step) { return "step " + std::to_string(step) + ": "; }

EvenAbsorptionPrice even_absorption_for(std::size_t group, double time, std::size_t index,
                                        double sold, const ConstraintSchedule& schedule,
                                        const LinearDemandParams& law, int step) {
    const std::size_t l = schedule.last_index();
    const double tol = detail::time_tol(schedule.horizon());
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_j = l;
    for (std::size_t j = index + 1; j <= l; ++j) {
        const auto req = schedule.sales_requirement(group, j);
        if (!req) continue;
        const double dt = schedule.times[j] - time;
        if (dt <= tol) continue;
        const double r = (*req - sold) / dt;
        // later requirement wins ties so the price is held as long as possible
        if (r >= best - 1e-12 * std::max(1.0, std::abs(best))) {
            best = std::max(best, r);
            best_j = j;
        }
    }
    const double mag = std::max(1.0, law.max_branch_rate());
    if (best < -1e-9 * mag) {
        throw InfeasibleScenario(step_prefix(step) + "group " + std::to_string(group) +
                                     " already exceeds its sales target for index " +
                                     std::to_string(best_j),
                                 group, best_j, step);
    }
    const double rate = std::max(0.0, best);
    double price = 0.0;
    try {
        price = law.invert(Rate{rate});
    } catch (const InfeasibleRate& e) {
        throw InfeasibleScenario(step_prefix(step) + "group " + std::to_string(group) +
                                     " cannot reach the sales requirement at index " +
                                     std::to_string(best_j) + " (" + e.what() + ")",
                                 group, best_j, step);
    }
    const double ptol = 1e-9 * std::max(1.0, law.choke_price());
    if (price < law.price_lo - ptol || price > law.price_hi + ptol) {
        throw InfeasibleScenario(step_prefix(step) + "group " + std::to_string(group) +
                                     " needs price " + std::to_string(price) +
                                     " outside its bounds to meet index " + std::to_string(best_j),
                                 group, best_j, step);
    }
    return {std::clamp(price, law.price_lo, law.price_hi), rate, best_j};
}

/// Smallest rate over [time, t_star] that keeps every later sales requirement
/// reachable at the group's fastest admissible rate afterwards.
double min_rate_until(std::size_t group, double time, double t_star, std::size_t index,
                      double sold, const ConstraintSchedule& schedule, const LinearDemandParams& law) {
    const double fastest = law.rate(law.price_lo).value;
    double need = 0.0;
    for (std::size_t j = index + 1; j <= schedule.last_index(); ++j) {
        const auto req = schedule.sales_requirement(group, j);
        if (!req) continue;
        const double tj = schedule.times[j];
        const double later = std::max(0.0, tj - t_star);
        const double span = std::min(tj, t_star) - time;
        if (span <= 0.0) continue;
        need = std::max(need, (*req - sold - fastest * later) / span);
    }
    return need;
}

void check_laws(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                const PlannerState& state) {
    const std::size_t k = schedule.group_count();
    if (laws.size() != k || state.sold.size() != k || state.revenue.size() != k) {
        throw DomainError("planner: group count mismatch between schedule, demand and state");
    }
    for (const auto& law : laws) law.validate();
}

}  // namespace

std::vector<EvenAbsorptionPrice> even_absorption_prices(const PlannerState& state,
                                                        const ConstraintSchedule& schedule,
                                                        std::span<const LinearDemandParams> laws) {
    check_laws(schedule, laws, state);
    if (!(state.time < schedule.horizon())) {
        throw DomainError("even_absorption_prices: no remaining horizon");
    }
    std::vector<EvenAbsorptionPrice> out;
    out.reserve(laws.size());
    for (std::size_t i = 0; i < laws.size(); ++i) {
        out.push_back(even_absorption_for(i, state.time, state.index, state.sold[i], schedule,
                                          laws[i], state.step));
    }
    return out;
}

SalesProjection sales_only_projection(const PlannerState& state, const ConstraintSchedule& schedule,
                                      std::span<const LinearDemandParams> laws) {
    check_laws(schedule, laws, state);
    const std::size_t l = schedule.last_index();
    SalesProjection proj(laws.size());
    for (std::size_t i = 0; i < laws.size(); ++i) {
        double t = state.time;
        double sold = state.sold[i];
        std::size_t idx = state.index;
        while (idx < l) {
            const auto ea = even_absorption_for(i, t, idx, sold, schedule, laws[i], state.step);
            const double end = schedule.times[ea.binding_index];
            proj[i].push_back({t, end, ea.price, ea.rate});
            sold += ea.rate * (end - t);
            t = end;
            idx = ea.binding_index;
        }
    }
    return proj;
}

double projected_revenue(const std::vector<ProjectedPiece>& pieces, double t0, double t1) {
    double total = 0.0;
    for (const auto& p : pieces) {
        const double a = std::max(p.begin, t0);
        const double b = std::min(p.end, t1);
        if (b > a) total += p.price * p.rate * (b - a);
    }
    return total;
}

std::vector<double> expected_revenue_at(const SalesProjection& projection,
                                        const ConstraintSchedule& schedule,
                                        const PlannerState& state) {
    std::vector<double> out(schedule.times.size(), 0.0);
    for (std::size_t j = state.index + 1; j < schedule.times.size(); ++j) {
        for (const auto& pieces : projection) {
            out[j] += projected_revenue(pieces, state.time, schedule.times[j]);
        }
    }
    return out;
}

std::vector<std::size_t> detect_burdensome(const PlannerState& state,
                                           const ConstraintSchedule& schedule,
                                           std::span<const double> expected) {
    std::vector<std::size_t> out;
    const double now = state.aggregate_revenue();
    for (std::size_t j = state.index + 1; j <= schedule.last_index(); ++j) {
        const auto floor = schedule.revenue_floor(j);
        if (!floor) continue;
        if (now + expected[j] < *floor - 1e-10 * std::max(1.0, *floor)) out.push_back(j);
    }
    return out;
}

StringentConstraint most_stringent(const PlannerState& state, const ConstraintSchedule& schedule,
                                   std::span<const double> expected,
                                   std::span<const std::size_t> burdensome) {
    if (burdensome.empty()) throw DomainError("most_stringent: empty burdensome set");
    const double now = state.aggregate_revenue();
    std::size_t best = burdensome.front();
    double best_measure = -std::numeric_limits<double>::infinity();
    for (std::size_t j : burdensome) {
        const double dt = schedule.times[j] - state.time;
        const double measure = (*schedule.revenue_floor(j) - now - expected[j]) / dt;
        if (measure > best_measure) {
            best_measure = measure;
            best = j;
        }
    }
    const double dt = schedule.times[best] - state.time;
    return {best, (*schedule.revenue_floor(best) - now) / dt};
}

PlanResult plan(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                DistributionMethod method, const PlannerState& start, const PlanOptions& options) {
    check_laws(schedule, laws, start);
    if (auto v = validate(schedule); !v.empty()) {
        throw DomainError("planner: invalid schedule: " + v.front().message);
    }
    const std::size_t k = laws.size();
    const std::size_t l = schedule.last_index();
    const double T = schedule.horizon();
    const double tol = default_tolerance(schedule);

    PlanResult result;
    result.policy.groups.resize(k);
    PlannerState state = start;

    while (state.index < l) {
        const auto proj = sales_only_projection(state, schedule, laws);
        const auto expected = expected_revenue_at(proj, schedule, state);
        const auto burdensome = detect_burdensome(state, schedule, expected);
        if (burdensome.empty()) {
            for (std::size_t i = 0; i < k; ++i) {
                for (const auto& p : proj[i]) {
                    result.policy.append(i, {p.begin, p.end, ConstantPrice{p.price}});
                }
            }
            break;
        }

        const auto target = most_stringent(state, schedule, expected, burdensome);
        if (target.index == l) {
            // Even absorption maximizes revenue for fixed final sales, so a
            // burdensome floor at the horizon cannot be met from here.
            throw InfeasibleScenario(step_prefix(state.step) +
                                         "revenue floor at the horizon exceeds the maximum "
                                         "revenue compatible with the final sales targets",
                                     InfeasibleScenario::npos, l, state.step);
        }
        const double t_next = schedule.times[target.index];
        const double dt = t_next - state.time;

        AllocationInput input;
        input.interval = dt;
        double expected_total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            GroupOutlook g;
            g.expected = projected_revenue(proj[i], state.time, t_next);
            g.maximum = detail::attainable_revenue_rate(
                            laws[i], min_rate_until(i, state.time, t_next, state.index,
                                                    state.sold[i], schedule, laws[i])) *
                        dt;
            g.current = state.revenue[i];
            expected_total += g.expected;
            input.groups.push_back(g);
        }
        input.shortfall = std::max(
            0.0, *schedule.revenue_floor(target.index) - state.aggregate_revenue() - expected_total);

        Allocation alloc;
        try {
            alloc = allocate(method, input);
        } catch (const InfeasibleTarget& e) {
            throw InfeasibleTarget(step_prefix(state.step) + e.what(), e.shortfall());
        }
        result.allocations.push_back({state.step, state.time, target.index, method, alloc});

        for (std::size_t i = 0; i < k; ++i) {
            double price = 0.0;
            try {
                price = laws[i].price_for_revenue_rate(alloc.target_rates[i], proj[i].front().price);
            } catch (const InfeasibleTarget& e) {
                throw InfeasibleTarget(step_prefix(state.step) + "group " + std::to_string(i) +
                                           ": " + e.what(),
                                       e.shortfall());
            }
            const double rate = laws[i].rate(price).value;
            for (std::size_t j = state.index + 1; j <= target.index; ++j) {
                const auto req = schedule.sales_requirement(i, j);
                if (req && state.sold[i] + rate * (schedule.times[j] - state.time) < *req - tol) {
                    throw InfeasibleScenario(step_prefix(state.step) + "group " +
                                                 std::to_string(i) +
                                                 " misses its sales floor at index " +
                                                 std::to_string(j) +
                                                 " after revenue redistribution",
                                             i, j, state.step);
                }
            }
            result.policy.append(i, {state.time, t_next, ConstantPrice{price}});
            state.sold[i] += rate * dt;
            state.revenue[i] += price * rate * dt;
        }
        result.selected.push_back(target.index);
        state.time = t_next;
        state.index = target.index;
        ++state.step;
    }

    std::vector<DemandModel> models;
    for (const auto& law : laws) models.emplace_back(law, T);
    const auto grid = detail::prediction_grid(schedule, start.time, options);
    result.predicted = integrate_policy(result.policy, models, grid,
                                        {start.time, start.sold, start.revenue});
    if (auto v = check_feasibility_against(schedule, result.predicted, tol, start.index + 1)) {
        throw InfeasibleScenario("planned policy violates " + std::string(to_string(v->kind)) +
                                     " at index " + std::to_string(v->index) + " (gap " +
                                     std::to_string(v->gap) + ")",
                                 v->group, v->index, state.step);
    }
    return result;
}

PlanResult plan(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                DistributionMethod method, const PlanOptions& options) {
    return plan(schedule, laws, method, PlannerState::initial(laws.size()), options);
}

}  // namespace dynprice
