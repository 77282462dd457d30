#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dynprice/demand.hpp"
#include "dynprice/planner.hpp"
#include "dynprice/time_value.hpp"

namespace dynprice {

// Under linear demand v = s(a - b p) and revenue weight zeta(t), the optimal
// normalized price for a fixed sales target is p(t) = (a/b - q/zeta(t)) / 2
// for a per-group constant q. Everything below is phrased in terms of q.

/// Constant q for one group on [begin, end).
struct TvmConstant {
    double begin = 0.0;
    double end = 0.0;
    double q = 0.0;
};

/// Per-group piecewise-constant q over the planned span.
struct TvmConstants {
    std::vector<std::vector<TvmConstant>> groups;
};

/// Sales of the q-curve over [t0, t1]: s (a (t1 - t0) + b q I) / 2.
double curve_sales(const TimeValueSpec& spec, const LinearDemandParams& law, double q, double t0,
                   double t1);

/// zeta-weighted revenue of the q-curve over [t0, t1]:
/// s ((a^2 / b) Z - b q^2 I) / 4 with Z = int zeta, I = int 1/zeta.
double curve_revenue(const TimeValueSpec& spec, const LinearDemandParams& law, double q, double t0,
                     double t1);

struct ClosedFormPolicy {
    double q = 0.0;
    DiscountedLinearPrice curve;
};

/// q = (2 S - a' dt) / (b' I(t0, t1)) selling exactly `sales` over [t0, t1]
/// (a' = s a, b' = s b). Throws BranchViolation if the curve leaves the
/// linear branch or the price bounds anywhere on the interval.
ClosedFormPolicy closed_form_policy(const TimeValueSpec& spec, const LinearDemandParams& law,
                                    double sales, double t0, double t1);

/// Throws BranchViolation unless the q-curve stays on the linear branch and
/// within price bounds on [t0, t1].
void check_branch(const TimeValueSpec& spec, const LinearDemandParams& law, double q, double t0,
                  double t1);

/// Max over `samples` grid points of |zeta v + zeta p v' + q v'|, normalized
/// by zeta(0) * s * a. Zero (to rounding) for the closed-form curve of q.
double verify_stationarity(const TimeValueSpec& spec, const LinearDemandParams& law,
                           const PriceCurve& curve, double q, double t0, double t1,
                           int samples = 1000);

/// Sales-only q-projection from state.time to the horizon (one constant per
/// stretch between binding sales requirements).
TvmConstants tvm_projection(const PlannerState& state, const ConstraintSchedule& schedule,
                            std::span<const LinearDemandParams> laws, const TimeValueSpec& spec);

/// Revenue of one group's q-pieces over [t0, t1].
double constants_revenue(const TimeValueSpec& spec, const LinearDemandParams& law,
                         const std::vector<TvmConstant>& pieces, double t0, double t1);

struct ConstantRecalculation {
    std::vector<double> q;
    Allocation allocation;
};

/// New per-group constants on [state.time, tau_floor] so that aggregate
/// revenue meets the floor at `floor_index` with equality. The gap is split
/// across groups by `method`; each group's q is found by bisection on
/// [q_current, 0] (q = 0 is the revenue-maximizing curve).
/// Throws InfeasibleTarget when a group's share exceeds its capacity.
ConstantRecalculation recalc_constants_for_floor(const TimeValueSpec& spec,
                                                 std::span<const LinearDemandParams> laws,
                                                 const PlannerState& state,
                                                 const ConstraintSchedule& schedule,
                                                 const TvmConstants& current,
                                                 std::size_t floor_index,
                                                 DistributionMethod method);

/// Time-value-aware planner. The policy's curves are normalized prices;
/// posted prices are kappa(t) p(t). Revenue in the predicted trajectory is
/// zeta-weighted.
PlanResult plan_tvm(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                    const TimeValueSpec& spec, DistributionMethod method, const PlannerState& start,
                    const PlanOptions& options = {});

PlanResult plan_tvm(const ConstraintSchedule& schedule, std::span<const LinearDemandParams> laws,
                    const TimeValueSpec& spec, DistributionMethod method,
                    const PlanOptions& options = {});

}  // namespace dynprice
