#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "dynprice/distribution.hpp"
#include "dynprice/simulator.hpp"

namespace dynprice::cli {

enum ExitCode : int { ok = 0, input_error = 1, infeasible = 2, budget_exceeded = 3 };

struct CommandOptions {
    std::string scenario;
    std::string out_dir = ".";
    std::optional<PlannerKind> planner;
    std::optional<DistributionMethod> method;
};

struct OracleOptions {
    std::size_t grid = 25;
    std::uint64_t budget = 50'000'000;
};

/// policy.csv, trajectory.csv, constraints_report.txt
int cmd_plan(const CommandOptions& opts, std::ostream& log);

/// cmd_plan outputs plus replans.csv and distribution_report.csv
int cmd_simulate(const CommandOptions& opts, std::ostream& log);

/// compare_prices.csv, compare_sales.csv, compare_revenue.csv, summary.txt
int cmd_compare(const CommandOptions& opts, std::ostream& log);

/// oracle_best.csv, gap_report.txt
int cmd_oracle(const CommandOptions& opts, const OracleOptions& oracle, std::ostream& log);

/// Nine significant digits, as in every CSV written here.
std::string fmt(double x);

}  // namespace dynprice::cli
