// Command line front end: plan one run, sweep a grid, verify concentration
// bounds by simulation, or dump a search tree for inspection.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bts/errors.hpp"
#include "bts/harness.hpp"

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct PlanArgs {
    std::string problem;
    std::string algo;
    std::int64_t budget = 0;
    std::uint64_t seed = 0;
    double epsilon = 0.1;
    int m = 0;
    int oracle_depth = 4;
    std::string out;
};

int run_plan(const PlanArgs& args) {
    bts::GeneratedProblem problem = bts::generate_problem(bts::problem_from_json_file(args.problem));
    bts::SearchConfig cfg;
    cfg.algorithm = bts::algorithm_from_name(args.algo);
    cfg.budget = args.budget;
    cfg.seed = args.seed;
    cfg.epsilon = args.epsilon;
    cfg.m = args.m;
    const bts::RunReport report = bts::run_search(problem.root, cfg);
    const bts::RegretResult regret = bts::regret_of(report, problem, args.oracle_depth);

    bts::RunRow row;
    row.run_id = 0;
    row.algo = args.algo;
    row.seed = args.seed;
    row.budget = args.budget;
    row.leaf_evals = report.leaf_evaluations;
    row.node_expansions = report.node_expansions;
    row.max_depth = report.max_depth_reached;
    row.chosen_action = report.chosen_branch;
    row.regret = regret.regret;
    row.bracket_width = regret.bracket_width;
    row.wallclock_ms = report.wallclock_ms;
    bts::write_run_csv(args.out, {row});

    std::cout << "chosen_action=" << report.chosen_branch << " regret=" << fmt_double(regret.regret)
              << (regret.exact ? "" : " (pessimistic)") << " leaf_evals=" << report.leaf_evaluations
              << "\n";
    return 0;
}

struct VerifyArgs {
    std::string lemma;
    int trials = 1000;
    std::string out;
};

int run_verify(const VerifyArgs& args) {
    const bts::VerifySummary summary = bts::verify_lemma(args.lemma, args.trials);
    bts::write_verify_csv(args.out, summary);
    std::cout << summary.lemma << ": " << (summary.pass ? "PASS" : "FAIL") << " (" << summary.detail
              << ")\n";
    return summary.pass ? 0 : 3;
}

struct SweepArgs {
    std::string config;
    std::string out;
};

int run_sweep_cmd(const SweepArgs& args) {
    bts::SweepSpec spec = bts::sweep_from_json_file(args.config);
    if (!args.out.empty()) spec.out = args.out;
    if (spec.out.empty())
        throw bts::validation_error("sweep needs an output path: config key 'out' or --out");
    const std::vector<bts::RunRow> rows = bts::run_sweep(spec);
    bts::write_run_csv(spec.out, rows);
    int failed = 0;
    for (const bts::RunRow& row : rows) failed += row.error.empty() ? 0 : 1;
    std::cout << rows.size() << " runs written to " << spec.out;
    if (failed > 0) std::cout << " (" << failed << " with errors)";
    std::cout << "\n";
    return 0;
}

struct DumpArgs {
    std::string problem;
    std::string algo;
    std::int64_t budget = 0;
    std::uint64_t seed = 0;
    double epsilon = 0.1;
    std::string out;
};

int run_dump(const DumpArgs& args) {
    bts::GeneratedProblem problem = bts::generate_problem(bts::problem_from_json_file(args.problem));
    bts::SearchConfig cfg;
    cfg.algorithm = bts::algorithm_from_name(args.algo);
    cfg.budget = args.budget;
    cfg.seed = args.seed;
    cfg.epsilon = args.epsilon;
    bts::BeliefTree tree(problem.root, cfg.node_cap);
    bts::run_search_with_tree(tree, cfg);

    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw bts::validation_error("cannot write " + args.out);
    out << "id,parent,depth,action,r,s_next,probability,lower_mean,upper_mean,samples\n";
    for (std::int64_t i = 0; i < tree.size(); ++i) {
        const bts::TreeNode& n = tree.node(i);
        out << n.id << ',' << n.parent << ',' << n.depth << ',' << n.action_in << ',' << n.reward_in
            << ',' << n.hyper.state << ',' << fmt_double(n.prob_in) << ','
            << (n.lower.empty() ? std::string() : fmt_double(n.lower.mean())) << ','
            << (n.upper.empty() ? std::string() : fmt_double(n.upper.mean())) << ','
            << n.lower.count() + n.upper.count() << '\n';
    }
    if (!out) throw bts::validation_error("failed writing " + args.out);
    std::cout << tree.size() << " nodes written to " << args.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"belief-tree search over Bayes-adaptive MDPs"};
    app.require_subcommand(1);

    PlanArgs plan;
    CLI::App* plan_cmd = app.add_subcommand("plan", "run one planner on one problem");
    plan_cmd->add_option("--problem", plan.problem, "problem JSON file")->required();
    plan_cmd->add_option("--algo", plan.algo, "flat-oracle|flat-stochastic|sbb1|sbb2")->required();
    plan_cmd->add_option("--budget", plan.budget, "leaf evaluation budget")->required();
    plan_cmd->add_option("--seed", plan.seed, "master seed");
    plan_cmd->add_option("--epsilon", plan.epsilon, "target accuracy");
    plan_cmd->add_option("--m", plan.m, "per-leaf samples (0 derives from epsilon)");
    plan_cmd->add_option("--oracle-depth", plan.oracle_depth, "regret reference depth");
    plan_cmd->add_option("--out", plan.out, "output CSV path")->required();

    VerifyArgs verify;
    CLI::App* verify_cmd = app.add_subcommand("verify", "simulate a concentration bound");
    verify_cmd->add_option("--lemma", verify.lemma, "L3|L4|L5|L6|L7|Hoeffding")->required();
    verify_cmd->add_option("--trials", verify.trials, "simulation trials (>= 100)");
    verify_cmd->add_option("--out", verify.out, "output CSV path")->required();

    SweepArgs sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run an algorithms x budgets x seeds grid");
    sweep_cmd->add_option("--config", sweep.config, "sweep JSON file")->required();
    sweep_cmd->add_option("--out", sweep.out, "output CSV path (overrides the config)");

    DumpArgs dump;
    CLI::App* dump_cmd = app.add_subcommand("dump-tree", "run a planner and dump its tree");
    dump_cmd->add_option("--problem", dump.problem, "problem JSON file")->required();
    dump_cmd->add_option("--algo", dump.algo, "flat-oracle|flat-stochastic|sbb1|sbb2")->required();
    dump_cmd->add_option("--budget", dump.budget, "leaf evaluation budget")->required();
    dump_cmd->add_option("--seed", dump.seed, "master seed");
    dump_cmd->add_option("--epsilon", dump.epsilon, "target accuracy");
    dump_cmd->add_option("--out", dump.out, "output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (plan_cmd->parsed()) return run_plan(plan);
        if (verify_cmd->parsed()) return run_verify(verify);
        if (sweep_cmd->parsed()) return run_sweep_cmd(sweep);
        if (dump_cmd->parsed()) return run_dump(dump);
        return 1;
    } catch (const bts::resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const bts::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
