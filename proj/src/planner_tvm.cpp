#include "dynprice/planner_tvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dynprice/errors.hpp"
#include "dynprice/numeric.hpp"
#include "dynprice/planner_base.hpp"

namespace dynprice {

double curve_sales(const TimeValueSpec& spec, const LinearDemandParams& law, double q, double t0,
                   double t1) {
    const double I = inv_phi_integral(spec, t0, t1);
    return 0.5 * law.scale * (law.a * (t1 - t0) + law.b * q * I);
}

double curve_revenue(const TimeValueSpec& spec, const LinearDemandParams& law, double q, double t0,
                     double t1) {
    const double Z = zeta_integral(spec, t0, t1);
    const double I = inv_phi_integral(spec, t0, t1);
    return 0.25 * law.scale * (law.a * law.a / law.b * Z - law.b * q * q * I);
}

void check_branch(const TimeValueSpec& spec, const LinearDemandParams& law, double q, double t0,
                  double t1) {
    constexpr int n = 256;
    const DiscountedLinearPrice curve{law.choke_price(), q};
    const double ptol = 1e-9 * std::max(1.0, law.choke_price());
    for (int s = 0; s <= n; ++s) {
        const double t = t0 + (t1 - t0) * s / n;
        const double p = evaluate(curve, spec, t);
        if (!law.on_linear_branch(p) || p < law.price_lo - ptol || p > law.price_hi + ptol) {
            throw BranchViolation("discounted policy leaves the linear demand branch at t=" +
                                  std::to_string(t) + " (price " + std::to_string(p) + ", q=" +
                                  std::to_string(q) + ")");
        }
    }
}

ClosedFormPolicy closed_form_policy(const TimeValueSpec& spec, const LinearDemandParams& law,
                                    double sales, double t0, double t1) {
    if (!(t1 > t0)) throw DomainError("closed_form_policy: empty interval");
    const double I = inv_phi_integral(spec, t0, t1);
    if (!(I > 0.0) || law.scale == 0.0) throw DomainError("closed_form_policy: degenerate interval or demand");
    const double q = (2.0 * sales - law.scale * law.a * (t1 - t0)) / (law.scale * law.b * I);
    check_branch(spec, law, q, t0, t1);
    return {q, DiscountedLinearPrice{law.choke_price(), q}};
}

double verify_stationarity(const TimeValueSpec& spec, const LinearDemandParams& law,
                           const PriceCurve& curve, double q, double t0, double t1, int samples) {
    const double slope = law.branch_slope();
    const double norm = spec.zeta(0.0) * std::max(law.scale * law.a, 1e-300);
    double worst = 0.0;
    for (int s = 0; s <= samples; ++s) {
        const double t = t0 + (t1 - t0) * s / samples;
        const double z = spec.zeta(t);
        const double p = evaluate(curve, spec, t);
        const double v = law.rate(p).value;
        worst = std::max(worst, std::abs(z * v + z * p * slope + q * slope));
    }
    return worst / norm;
}

namespace {

std::string step_prefix(int step) { return "step " + std::to_string(step) + ": "; }

TvmConstant tvm_even_for(std::size_t group, double time, std::size_t index, double sold,
                         const ConstraintSchedule& schedule, const LinearDemandParams& law,
                         const TimeValueSpec& spec, int step, std::size_t& binding) {
    const std::size_t l = schedule.last_index();
    const double tol = detail::time_tol(schedule.horizon());
    double best = -std::numeric_limits<double>::infinity();
    binding = l;
    for (std::size_t j = index + 1; j <= l; ++j) {
        const auto req = schedule.sales_requirement(group, j);
        if (!req) continue;
        const double tj = schedule.times[j];
        if (tj - time <= tol) continue;
        const double I = inv_phi_integral(spec, time, tj);
        const double q = (2.0 * (*req - sold) - law.scale * law.a * (tj - time)) /
                         (law.scale * law.b * I);
        if (q >= best - 1e-12 * std::max(1.0, std::abs(best))) {
            best = std::max(best, q);
            binding = j;
        }
    }
    const double end = schedule.times[binding];
    try {
        check_branch(spec, law, best, time, end);
    } catch (const BranchViolation& e) {
        throw BranchViolation(step_prefix(step) + "group " + std::to_string(group) +
                              " sales requirement at index " + std::to_string(binding) + ": " +
                              e.what());
    }
    return {time, end, best};
}

/// Solves curve_revenue(q) = target on the side of q_current.
double solve_q_for_revenue(const TimeValueSpec& spec, const LinearDemandParams& law, double q_current,
                           double q_floor, double target, double t0, double t1) {
    const double q_top = std::max(0.0, q_floor);
    const double top = curve_revenue(spec, law, q_top, t0, t1);
    const double slack = 1e-12 * std::max(1.0, std::abs(top));
    if (target > top + slack) {
        throw InfeasibleTarget("revenue target " + std::to_string(target) +
                                   " exceeds discounted capacity " + std::to_string(top),
                               target - top);
    }
    if (target >= top - slack || q_current == q_top) return q_top;
    auto f = [&](double q) { return curve_revenue(spec, law, q, t0, t1) - target; };
    double far = q_current;
    for (int i = 0; i < 200 && f(far) > 0.0; ++i) far = q_top + 2.0 * (far - q_top);
    const auto r = numeric::bisect(f, std::min(far, q_top), std::max(far, q_top), 1e-10, 200);
    return r.x;
}

/// Smallest q on [time, t_star] that keeps every later sales requirement
/// reachable at the group's fastest admissible rate afterwards.
double min_q_until(std::size_t group, const PlannerState& state, double t_star,
                   const ConstraintSchedule& schedule, const LinearDemandParams& law,
                   const TimeValueSpec& spec) {
    const double fastest = law.rate(law.price_lo).value;
    double need = 0.0;
    for (std::size_t j = state.index + 1; j <= schedule.last_index(); ++j) {
        const auto req = schedule.sales_requirement(group, j);
        if (!req || schedule.times[j] < t_star) continue;
        need = std::max(need, *req - state.sold[group] - fastest * (schedule.times[j] - t_star));
    }
    const double I = inv_phi_integral(spec, state.time, t_star);
    return (2.0 * need - law.scale * law.a * (t_star - state.time)) / (law.scale * law.b * I);
}

void check_inputs(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                  const PlannerState& state, const TimeValueSpec& spec) {
    const std::size_t k = schedule.group_count();
    if (laws.size() != k || state.sold.size() != k || state.revenue.size() != k) {
        throw DomainError("tvm planner: group count mismatch between schedule, demand and state");
    }
    for (const auto& law : laws) law.validate();
    spec.validate(schedule.horizon());
}

}  // namespace

TvmConstants tvm_projection(const PlannerState& state, const ConstraintSchedule& schedule,
                            std::span<const LinearDemandParams> laws, const TimeValueSpec& spec) {
    check_inputs(schedule, laws, state, spec);
    const std::size_t l = schedule.last_index();
    TvmConstants out;
    out.groups.resize(laws.size());
    for (std::size_t i = 0; i < laws.size(); ++i) {
        double t = state.time;
        double sold = state.sold[i];
        std::size_t idx = state.index;
        while (idx < l) {
            std::size_t binding = l;
            const auto piece =
                tvm_even_for(i, t, idx, sold, schedule, laws[i], spec, state.step, binding);
            out.groups[i].push_back(piece);
            sold += curve_sales(spec, laws[i], piece.q, piece.begin, piece.end);
            t = piece.end;
            idx = binding;
        }
    }
    return out;
}

double constants_revenue(const TimeValueSpec& spec, const LinearDemandParams& law,
                         const std::vector<TvmConstant>& pieces, double t0, double t1) {
    double total = 0.0;
    for (const auto& p : pieces) {
        const double a = std::max(p.begin, t0);
        const double b = std::min(p.end, t1);
        if (b > a) total += curve_revenue(spec, law, p.q, a, b);
    }
    return total;
}

ConstantRecalculation recalc_constants_for_floor(const TimeValueSpec& spec,
                                                 std::span<const LinearDemandParams> laws,
                                                 const PlannerState& state,
                                                 const ConstraintSchedule& schedule,
                                                 const TvmConstants& current,
                                                 std::size_t floor_index,
                                                 DistributionMethod method) {
    const auto floor = schedule.revenue_floor(floor_index);
    if (!floor) throw DomainError("recalc_constants_for_floor: no revenue floor at index");
    const double t_s = schedule.times[floor_index];
    const double dt = t_s - state.time;
    if (!(dt > 0.0)) throw DomainError("recalc_constants_for_floor: floor is not in the future");
    const double Z = zeta_integral(spec, state.time, t_s);

    AllocationInput input;
    input.interval = dt;
    double expected_total = 0.0;
    std::vector<double> q_floor(laws.size());
    for (std::size_t i = 0; i < laws.size(); ++i) {
        GroupOutlook g;
        g.expected = constants_revenue(spec, laws[i], current.groups[i], state.time, t_s);
        q_floor[i] = min_q_until(i, state, t_s, schedule, laws[i], spec);
        g.maximum = q_floor[i] > 0.0 ? curve_revenue(spec, laws[i], q_floor[i], state.time, t_s)
                                     : laws[i].max_revenue_rate() * Z;
        g.current = state.revenue[i];
        expected_total += g.expected;
        input.groups.push_back(g);
    }
    input.shortfall = std::max(0.0, *floor - state.aggregate_revenue() - expected_total);

    ConstantRecalculation out;
    out.allocation = allocate(method, input);
    out.q.resize(laws.size());
    for (std::size_t i = 0; i < laws.size(); ++i) {
        const double target = input.groups[i].expected + out.allocation.shares[i];
        try {
            out.q[i] = solve_q_for_revenue(spec, laws[i], current.groups[i].front().q, q_floor[i], target,
                                           state.time, t_s);
        } catch (const InfeasibleTarget& e) {
            throw InfeasibleTarget("group " + std::to_string(i) + ": " + e.what(), e.shortfall());
        }
    }
    return out;
}

PlanResult plan_tvm(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                    const TimeValueSpec& spec, DistributionMethod method, const PlannerState& start,
                    const PlanOptions& options) {
    check_inputs(schedule, laws, start, spec);
    if (auto v = validate(schedule); !v.empty()) {
        throw DomainError("tvm planner: invalid schedule: " + v.front().message);
    }
    const std::size_t k = laws.size();
    const std::size_t l = schedule.last_index();
    const double T = schedule.horizon();
    const double tol = default_tolerance(schedule);

    PlanResult result;
    result.policy.time_value = spec;
    result.policy.groups.resize(k);
    PlannerState state = start;

    auto append_curve = [&](std::size_t i, double b, double e, double q) {
        result.policy.append(i, {b, e, DiscountedLinearPrice{laws[i].choke_price(), q}});
    };

    while (state.index < l) {
        const auto proj = tvm_projection(state, schedule, laws, spec);
        std::vector<double> expected(schedule.times.size(), 0.0);
        for (std::size_t j = state.index + 1; j <= l; ++j) {
            for (std::size_t i = 0; i < k; ++i) {
                expected[j] += constants_revenue(spec, laws[i], proj.groups[i], state.time,
                                                 schedule.times[j]);
            }
        }
        const auto unmet = detect_burdensome(state, schedule, expected);
        if (unmet.empty()) {
            for (std::size_t i = 0; i < k; ++i) {
                for (const auto& p : proj.groups[i]) append_curve(i, p.begin, p.end, p.q);
            }
            break;
        }

        // Meet the earliest unmet floor; if holding the new constants still
        // leaves some floor unmet, retarget to the first such floor.
        std::size_t target = unmet.front();
        ConstantRecalculation rec;
        const double now = state.aggregate_revenue();
        bool settled = false;
        for (std::size_t pass = 0; pass < l && !settled; ++pass) {
            if (target == l) {
                throw InfeasibleScenario(step_prefix(state.step) +
                                             "revenue floor at the horizon exceeds the maximum "
                                             "discounted revenue compatible with the final sales "
                                             "targets",
                                         InfeasibleScenario::npos, l, state.step);
            }
            try {
                rec = recalc_constants_for_floor(spec, laws, state, schedule, proj, target, method);
            } catch (const InfeasibleTarget& e) {
                throw InfeasibleTarget(step_prefix(state.step) + e.what(), e.shortfall());
            }
            settled = true;
            for (std::size_t j = state.index + 1; j <= l; ++j) {
                const auto floor = schedule.revenue_floor(j);
                if (!floor) continue;
                double held = now;
                for (std::size_t i = 0; i < k; ++i) {
                    held += curve_revenue(spec, laws[i], rec.q[i], state.time, schedule.times[j]);
                }
                if (held < *floor - 1e-9 * std::max(1.0, *floor)) {
                    target = j;
                    settled = false;
                    break;
                }
            }
        }
        if (!settled) {
            throw ConvergenceError(step_prefix(state.step) +
                                   "constant recalculation did not settle within " +
                                   std::to_string(l) + " passes");
        }

        const double t_next = schedule.times[target];
        result.allocations.push_back({state.step, state.time, target, method, rec.allocation});
        for (std::size_t i = 0; i < k; ++i) {
            try {
                check_branch(spec, laws[i], rec.q[i], state.time, t_next);
            } catch (const BranchViolation& e) {
                throw BranchViolation(step_prefix(state.step) + "group " + std::to_string(i) + ": " +
                                      e.what());
            }
            for (std::size_t j = state.index + 1; j <= target; ++j) {
                const auto req = schedule.sales_requirement(i, j);
                if (!req) continue;
                const double sold =
                    state.sold[i] + curve_sales(spec, laws[i], rec.q[i], state.time, schedule.times[j]);
                if (sold < *req - tol) {
                    throw InfeasibleScenario(step_prefix(state.step) + "group " + std::to_string(i) +
                                                 " misses its sales floor at index " +
                                                 std::to_string(j) +
                                                 " after revenue redistribution",
                                             i, j, state.step);
                }
            }
            append_curve(i, state.time, t_next, rec.q[i]);
            state.sold[i] += curve_sales(spec, laws[i], rec.q[i], state.time, t_next);
            state.revenue[i] += curve_revenue(spec, laws[i], rec.q[i], state.time, t_next);
        }
        result.selected.push_back(target);
        state.time = t_next;
        state.index = target;
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

PlanResult plan_tvm(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                    const TimeValueSpec& spec, DistributionMethod method,
                    const PlanOptions& options) {
    return plan_tvm(schedule, laws, spec, method, PlannerState::initial(laws.size()), options);
}

}  // namespace dynprice
