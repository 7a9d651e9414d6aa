#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bts/search.hpp"

namespace bts {

enum class Generator { kExplicit, kRandomMdp, kTwoArmedBandit, kChain, kFiniteMixture };

Generator generator_from_name(const std::string& name);
std::string generator_name(Generator g);
Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm a);

/**
 * Declarative problem description, loadable from JSON. Generator parameters
 * that do not belong to the chosen generator must be left at their defaults;
 * unknown JSON keys are rejected outright.
 */
struct ProblemSpec {
    int n_states = 1;
    int n_actions = 2;
    double gamma = 0.95;
    Generator generator = Generator::kTwoArmedBandit;
    // explicit generator: conjugate prior tables (empty = all-ones prior)
    std::vector<double> prior_transition_counts;  // [s][a][s']
    std::vector<double> prior_reward_alpha;       // [s][a]
    std::vector<double> prior_reward_beta;        // [s][a]
    // explicit generator: mixture support instead of a conjugate prior
    std::vector<WeightedMdp> finite_support;
    // random_mdp / finite_mixture
    std::uint64_t generator_seed = 0;
    // two_armed_bandit
    std::vector<double> bandit_alpha;  // two entries when given
    std::vector<double> bandit_beta;
    // chain
    double chain_strength = 10.0;
    // finite_mixture
    int mixture_components = 0;
    std::vector<double> mixture_weights;  // empty = random weights
    // carried for downstream experiments; nothing in this artifact consumes it
    std::optional<std::uint64_t> true_mdp_seed;

    void validate() const;
};

ProblemSpec problem_from_json(const std::string& text);
ProblemSpec problem_from_json_file(const std::string& path);

struct GeneratedProblem {
    HyperState root;
    int branching_factor = 0;
};

/// Deterministic in the spec (including its seeds). Root state is 0.
GeneratedProblem generate_problem(const ProblemSpec& spec);

/**
 * Regret of a run against the exhaustive oracle at oracle_depth. With finite
 * support the oracle's leaf values are exact and regret compares reference
 * lower values; otherwise the regret is pessimistic: best reference upper
 * minus chosen reference lower. bracket_width reports the widest per-branch
 * reference bracket either way.
 */
struct RegretResult {
    double regret = 0.0;
    double bracket_width = 0.0;
    bool exact = false;
    std::vector<double> reference_lower;
    std::vector<double> reference_upper;
};

RegretResult regret_of(const RunReport& report, const GeneratedProblem& problem, int oracle_depth,
                       std::int64_t node_cap = 1000000);

/// Sweep over algorithms x budgets x seeds on one problem.
struct SweepSpec {
    ProblemSpec problem;
    std::vector<Algorithm> algorithms;
    std::vector<std::int64_t> budgets;
    int seeds = 1;  // master seeds 0..seeds-1
    double epsilon = 0.5;
    int m = 0;
    int final_lower_samples = 32;
    int oracle_depth = 4;
    std::int64_t node_cap = 1000000;
    std::string out;  // default output path; the CLI flag overrides

    void validate() const;
};

SweepSpec sweep_from_json(const std::string& text);
SweepSpec sweep_from_json_file(const std::string& path);

/// One CSV row. When error is non-empty the run failed and every result
/// field after it is a zero placeholder.
struct RunRow {
    std::int64_t run_id = 0;
    std::string algo;
    std::uint64_t seed = 0;
    std::int64_t budget = 0;
    std::int64_t leaf_evals = 0;
    std::int64_t node_expansions = 0;
    int max_depth = 0;
    int chosen_action = -1;
    double regret = 0.0;
    double bracket_width = 0.0;
    std::string error;
    double wallclock_ms = 0.0;
};

std::vector<RunRow> run_sweep(const SweepSpec& sweep);

std::string run_csv_header();
std::string run_csv_line(const RunRow& row);
void write_run_csv(const std::string& path, const std::vector<RunRow>& rows);
std::vector<RunRow> parse_run_csv(const std::string& text);

/// One grid point of a lemma verification: empirical statistic vs the
/// concentration-module bound it must stay under.
struct VerifyPoint {
    std::string series;
    double x = 0.0;
    double empirical = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct VerifySummary {
    std::string lemma;
    bool pass = false;
    std::string detail;
    std::vector<VerifyPoint> points;
};

/// name in {L3, L4, L5, L6, L7, Hoeffding}; trials >= 100. Deterministic.
VerifySummary verify_lemma(const std::string& name, int trials);

void write_verify_csv(const std::string& path, const VerifySummary& summary);

}  // namespace bts
