#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "dynprice/errors.hpp"
#include "dynprice/oracle.hpp"
#include "dynprice/planner_base.hpp"
#include "dynprice/scenario_io.hpp"

namespace dynprice::cli {

std::string fmt(double x) {
    if (x == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

namespace {

namespace fs = std::filesystem;

class OutDir {
public:
    explicit OutDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    void write(const std::string& name, const std::string& content) const {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + (dir_ / name).string());
        out << content;
    }

private:
    fs::path dir_;
};

Scenario load(const CommandOptions& opts) {
    Scenario s = load_scenario(opts.scenario);
    if (opts.planner) s.planner = *opts.planner;
    if (opts.method) s.method = *opts.method;
    return s;
}

/// Maps library exceptions onto exit codes; `on_infeasible` may write a
/// report before the code is returned.
int guarded(std::ostream& log, const std::function<int()>& body,
            const std::function<void(const std::string&)>& on_infeasible = {}) {
    auto infeasible_with = [&](const std::exception& e) {
        log << "infeasible: " << e.what() << "\n";
        if (on_infeasible) on_infeasible(e.what());
        return infeasible;
    };
    try {
        return body();
    } catch (const InputError& e) {
        log << "input error: " << e.what() << "\n";
        return input_error;
    } catch (const DomainError& e) {
        log << "input error: " << e.what() << "\n";
        return input_error;
    } catch (const BudgetExceeded& e) {
        log << "budget exceeded: " << e.what() << " (required budget " << e.required() << ")\n";
        return budget_exceeded;
    } catch (const InfeasibleScenario& e) {
        return infeasible_with(e);
    } catch (const InfeasibleTarget& e) {
        return infeasible_with(e);
    } catch (const InfeasibleRate& e) {
        return infeasible_with(e);
    } catch (const BranchViolation& e) {
        return infeasible_with(e);
    } catch (const ConvergenceError& e) {
        return infeasible_with(e);
    }
}

std::string policy_csv(const PricingPolicy& policy, std::span<const double> grid) {
    std::ostringstream out;
    out << "t,group,price,posted_price\n";
    for (std::size_t i = 0; i < policy.group_count(); ++i) {
        for (const auto& seg : policy.groups[i].segments) {
            std::vector<double> times{seg.begin};
            if (!std::holds_alternative<ConstantPrice>(seg.curve)) {
                for (double t : grid) {
                    if (t > seg.begin && t < seg.end) times.push_back(t);
                }
            }
            for (double t : times) {
                out << fmt(t) << ',' << i << ',' << fmt(evaluate(seg.curve, policy.time_value, t))
                    << ',' << fmt(policy.posted_price_at(i, t)) << '\n';
            }
        }
    }
    return out.str();
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << 't';
    for (std::size_t i = 0; i < traj.group_count(); ++i) out << ",sales_" << i << ",revenue_" << i;
    out << ",aggregate\n";
    for (std::size_t n = 0; n < traj.grid.size(); ++n) {
        out << fmt(traj.grid[n]);
        for (std::size_t i = 0; i < traj.group_count(); ++i) {
            out << ',' << fmt(traj.sales[i][n]) << ',' << fmt(traj.revenue[i][n]);
        }
        out << ',' << fmt(traj.aggregate[n]) << '\n';
    }
    return out.str();
}

std::string constraints_report(const Scenario& s, const Trajectory& traj,
                               const std::optional<std::string>& problem) {
    const auto& sch = s.schedule;
    const double tol = default_tolerance(sch);
    std::ostringstream out;
    out << "scenario: " << s.name << "\n";
    out << "planner: " << to_string(s.planner) << "\n";
    out << "distribution: " << to_string(s.method) << "\n";
    out << "tolerance: " << fmt(tol) << "\n";
    if (problem) out << "status: INFEASIBLE\nreason: " << *problem << "\n";
    if (traj.grid.empty()) return out.str();

    std::size_t violated = 0;
    auto line = [&](const char* kind, const std::string& who, std::size_t j, double required,
                    double achieved, bool ok) {
        out << kind << ' ' << who << " j=" << j << " t=" << fmt(sch.times[j])
            << " required=" << fmt(required) << " achieved=" << fmt(achieved) << ' '
            << (ok ? "OK" : "VIOLATED") << '\n';
        if (!ok) ++violated;
    };
    const std::size_t l = sch.last_index();
    for (std::size_t j = 1; j <= l; ++j) {
        const double t = sch.times[j];
        for (std::size_t i = 0; i < sch.group_count(); ++i) {
            const double sold = traj.sales_at(i, t);
            const std::string who = "group=" + std::to_string(i);
            if (j < l) {
                if (const auto f = sch.sales_requirement(i, j)) {
                    line("sales_floor", who, j, *f, sold, sold >= *f - tol);
                }
            } else {
                const double f = sch.final_sales[i];
                line("final_sales", who, j, f, sold, std::abs(sold - f) <= tol);
            }
        }
        if (const auto f = sch.revenue_floor(j)) {
            const double r = traj.aggregate_at(t);
            line("revenue_floor", "aggregate", j, *f, r, r >= *f - tol);
        }
    }
    out << "final_revenue: " << fmt(traj.aggregate.back()) << "\n";
    if (!problem) out << "status: " << (violated == 0 ? "FEASIBLE" : "INFEASIBLE") << "\n";
    return out.str();
}

std::vector<double> output_grid(const Scenario& s) {
    const double T = s.horizon();
    return make_grid(0.0, T, s.grid_step > 0.0 ? s.grid_step : T / 1000.0, s.schedule.times);
}

std::string replans_csv(const SimulationResult& sim, std::size_t k) {
    std::ostringstream out;
    out << "t,trigger";
    for (std::size_t i = 0; i < k; ++i) out << ",old_price_" << i << ",new_price_" << i;
    out << '\n';
    for (const auto& r : sim.replans) {
        out << fmt(r.time) << ',' << r.trigger;
        for (std::size_t i = 0; i < k; ++i) out << ',' << fmt(r.old_prices[i]) << ',' << fmt(r.new_prices[i]);
        out << '\n';
    }
    return out.str();
}

std::string distribution_csv(const SimulationResult& sim, std::size_t k) {
    std::ostringstream out;
    out << "t,step,target_index,method";
    for (std::size_t i = 0; i < k; ++i) out << ",weight_" << i;
    out << ",equal_split\n";
    for (const auto& row : distribution_report(sim)) {
        out << fmt(row.time) << ',' << row.step << ',' << row.target_index << ','
            << to_string(row.method);
        for (double w : row.weights) out << ',' << fmt(w);
        out << ',' << (row.equal_split_fallback ? 1 : 0) << '\n';
    }
    return out.str();
}

/// Side-by-side table of one quantity for both methods.
std::string side_by_side(const ComparisonResult& c, std::size_t k, const char* what,
                         const std::function<double(const SimulationResult&, std::size_t, double)>& get) {
    const auto& grid = c.headroom.trajectory.grid;
    std::ostringstream out;
    out << 't';
    for (std::size_t i = 0; i < k; ++i) {
        out << ',' << what << "_headroom_" << i << ',' << what << "_revshare_" << i;
    }
    out << '\n';
    for (double t : grid) {
        out << fmt(t);
        for (std::size_t i = 0; i < k; ++i) {
            out << ',' << fmt(get(c.headroom, i, t)) << ',' << fmt(get(c.revenue_share, i, t));
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace

int cmd_plan(const CommandOptions& opts, std::ostream& log) {
    std::optional<Scenario> scenario;
    std::optional<OutDir> out;
    return guarded(
        log,
        [&] {
            scenario = load(opts);
            out.emplace(opts.out_dir);
            const auto result = plan_with(*scenario, scenario->initial_laws(),
                                          PlannerState::initial(scenario->groups.size()));
            out->write("policy.csv", policy_csv(result.policy, output_grid(*scenario)));
            out->write("trajectory.csv", trajectory_csv(result.predicted));
            out->write("constraints_report.txt",
                       constraints_report(*scenario, result.predicted, std::nullopt));
            log << "final_revenue=" << fmt(result.predicted.aggregate.back()) << "\n";
            return ok;
        },
        [&](const std::string& why) {
            if (scenario && out) out->write("constraints_report.txt", constraints_report(*scenario, {}, why));
        });
}

int cmd_simulate(const CommandOptions& opts, std::ostream& log) {
    std::optional<Scenario> scenario;
    std::optional<OutDir> out;
    return guarded(
        log,
        [&] {
            scenario = load(opts);
            out.emplace(opts.out_dir);
            const auto sim = run(*scenario);
            const std::size_t k = scenario->groups.size();
            out->write("policy.csv", policy_csv(sim.executed, sim.trajectory.grid));
            out->write("trajectory.csv", trajectory_csv(sim.trajectory));
            out->write("constraints_report.txt",
                       constraints_report(*scenario, sim.trajectory, sim.infeasibility));
            out->write("replans.csv", replans_csv(sim, k));
            out->write("distribution_report.csv", distribution_csv(sim, k));
            log << "final_revenue=" << fmt(sim.final_revenue) << "\n";
            if (!sim.feasible()) {
                log << "infeasible: " << (sim.infeasibility ? *sim.infeasibility : "constraint violated")
                    << "\n";
                return infeasible;
            }
            return ok;
        },
        [&](const std::string& why) {
            if (scenario && out) out->write("constraints_report.txt", constraints_report(*scenario, {}, why));
        });
}

int cmd_compare(const CommandOptions& opts, std::ostream& log) {
    return guarded(log, [&] {
        const Scenario scenario = load(opts);
        const OutDir out(opts.out_dir);
        const auto c = compare(scenario);
        const std::size_t k = scenario.groups.size();
        out.write("compare_prices.csv",
                  side_by_side(c, k, "price", [](const SimulationResult& s, std::size_t i, double t) {
                      return s.executed.price_at(i, t);
                  }));
        out.write("compare_sales.csv",
                  side_by_side(c, k, "sales", [](const SimulationResult& s, std::size_t i, double t) {
                      return s.trajectory.sales_at(i, t);
                  }));
        out.write("compare_revenue.csv",
                  side_by_side(c, k, "revenue", [](const SimulationResult& s, std::size_t i, double t) {
                      return s.trajectory.revenue_at(i, t);
                  }));
        const std::string summary = "headroom=" + fmt(c.headroom.final_revenue) +
                                    " revshare=" + fmt(c.revenue_share.final_revenue) +
                                    " delta_pct=" + fmt(c.delta_pct) + "\n";
        out.write("summary.txt", summary);
        log << summary;
        if (!c.headroom.feasible() || !c.revenue_share.feasible()) return infeasible;
        return ok;
    });
}

int cmd_oracle(const CommandOptions& opts, const OracleOptions& oracle, std::ostream& log) {
    return guarded(log, [&] {
        const Scenario scenario = load(opts);
        if (oracle.grid < 2) throw InputError("--grid must be at least 2", "grid");
        const OutDir out(opts.out_dir);
        const auto laws = scenario.initial_laws();
        const auto grid = default_grid(laws, oracle.grid, oracle.budget);
        const auto best = oracle_best(scenario.schedule, laws, grid, scenario.time_value);

        std::ostringstream csv;
        csv << "group,segment,t_begin,t_end,price\n";
        for (std::size_t i = 0; i < best.prices.size(); ++i) {
            for (std::size_t j = 0; j < best.prices[i].size(); ++j) {
                csv << i << ',' << j + 1 << ',' << fmt(scenario.schedule.times[j]) << ','
                    << fmt(scenario.schedule.times[j + 1]) << ',' << fmt(best.prices[i][j]) << '\n';
            }
        }
        out.write("oracle_best.csv", csv.str());

        std::ostringstream rep;
        rep << "planner: " << to_string(scenario.planner) << "\n";
        rep << "distribution: " << to_string(scenario.method) << "\n";
        rep << "grid_points: " << oracle.grid << "\n";
        rep << "evaluated: " << best.evaluated << "\n";
        rep << "feasible: " << best.feasible << "\n";
        for (std::size_t i = 0; i < best.sales_band.size(); ++i) {
            rep << "sales_band_" << i << ": " << fmt(best.sales_band[i]) << "\n";
        }
        rep << "oracle_revenue: " << fmt(best.revenue) << "\n";
        try {
            const auto planned = plan_with(scenario, laws, PlannerState::initial(laws.size()));
            const double r = planned.predicted.aggregate.back();
            rep << "planner_revenue: " << fmt(r) << "\n";
            rep << "gap: " << fmt(best.revenue - r) << "\n";
            rep << "gap_pct: " << fmt(best.revenue != 0.0 ? 100.0 * (best.revenue - r) / best.revenue : 0.0)
                << "\n";
            rep << "planner_le_oracle: " << (r <= best.revenue + 1e-6 ? "yes" : "no") << "\n";
        } catch (const std::exception& e) {
            rep << "planner_revenue: infeasible (" << e.what() << ")\n";
        }
        out.write("gap_report.txt", rep.str());
        log << "oracle_revenue=" << fmt(best.revenue) << "\n";
        return ok;
    });
}

}  // namespace dynprice::cli
