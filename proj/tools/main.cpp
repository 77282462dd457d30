#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "cli.hpp"

int main(int argc, char** argv) {
    using namespace dynprice;
    CLI::App app{"Constrained dynamic pricing for multiple product groups"};
    app.require_subcommand(1);

    cli::CommandOptions opts;
    cli::OracleOptions oracle;
    std::string planner;
    std::string distribution;

    const std::map<std::string, PlannerKind> planners{{"base", PlannerKind::base},
                                                       {"tvm", PlannerKind::tvm}};
    const std::map<std::string, DistributionMethod> methods{
        {"headroom", DistributionMethod::headroom}, {"revshare", DistributionMethod::revenue_share}};

    auto common = [&](CLI::App* cmd, bool choose) {
        cmd->add_option("file", opts.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
        if (choose) {
            cmd->add_option("--planner", planner, "base or tvm (overrides the scenario)")
                ->check(CLI::IsMember({"base", "tvm"}));
            cmd->add_option("--distribution", distribution,
                            "headroom or revshare (overrides the scenario)")
                ->check(CLI::IsMember({"headroom", "revshare"}));
        }
    };

    auto* plan = app.add_subcommand("plan", "Plan a pricing policy");
    common(plan, true);
    auto* simulate = app.add_subcommand("simulate", "Simulate with demand-change events");
    common(simulate, true);
    auto* comp = app.add_subcommand("compare", "Compare the two distribution methods");
    common(comp, true);
    auto* orc = app.add_subcommand("oracle", "Brute-force grid optimum and planner gap");
    common(orc, true);
    orc->add_option("--grid", oracle.grid, "Grid points per group")->capture_default_str();
    orc->add_option("--budget", oracle.budget, "Maximum policies to enumerate")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::input_error;
    }
    if (!planner.empty()) opts.planner = planners.at(planner);
    if (!distribution.empty()) opts.method = methods.at(distribution);

    if (plan->parsed()) return cli::cmd_plan(opts, std::cerr);
    if (simulate->parsed()) return cli::cmd_simulate(opts, std::cerr);
    if (comp->parsed()) return cli::cmd_compare(opts, std::cout);
    return cli::cmd_oracle(opts, oracle, std::cerr);
}
