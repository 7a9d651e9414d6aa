#pragma once

#include <cstdint>
#include <vector>

#include "bts/tree.hpp"

namespace bts {

enum class Algorithm { kFlatOracle, kFlatStochastic, kSbb1, kSbb2 };

/**
 * Planner parameters. epsilon drives the flat algorithms' depth choice, m the
 * flat stochastic per-leaf sample count (0 derives it from epsilon), budget
 * the total number of leaf evaluations the tree policies spread between
 * exploration and the final commit pass.
 */
struct SearchConfig {
    double epsilon = 0.1;
    std::int64_t budget = 10000;
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::kSbb1;
    int m = 0;
    int final_lower_samples = 32;
    std::int64_t node_cap = 1000000;
    bool record_audit = false;

    void validate() const;
};

/// One event of a recorded search trace: 'u'/'l' bound draws, 'x' expansions.
struct AuditRecord {
    std::int64_t iteration = 0;
    char kind = 'u';
    std::int64_t node_id = -1;
    double value = 0.0;
};

struct RunReport {
    int chosen_branch = -1;
    std::int64_t leaf_evaluations = 0;
    std::int64_t node_expansions = 0;
    int max_depth_reached = 0;
    double wallclock_ms = 0.0;
    std::vector<AuditRecord> audit;
};

/// Max discounted return when rewards live in {0, 1}: 1 / (1 - gamma).
inline double value_bound(double gamma) { return 1.0 / (1.0 - gamma); }

/// Smallest k with beta * gamma^k <= beta * ratio, i.e. ceil(log_gamma ratio),
/// clamped to 0 for ratio >= 1.
int depth_for_accuracy(double gamma, double ratio);

/// Nodes below the root of a uniformly expanded depth-k tree,
/// sum_{j=1..k} phi^j, saturated at INT64_MAX.
std::int64_t uniform_tree_nodes(std::int64_t phi, int k);

/// Per-leaf sample count the flat stochastic policy derives from its target
/// accuracy: max(1, ceil(2 k ln phi)) with k = ceil(log_gamma(epsilon / 2 beta)).
int flat_stochastic_samples(double gamma, double epsilon, std::int64_t phi);

/// Pooled mean of the raw upper samples stored on the leaf's root path at
/// depths in [ceil(d/2), d], d the leaf's depth. The window as a whole must
/// hold at least one sample.
double window_estimate(const BeliefTree& tree, std::int64_t leaf_id);

/// Runs cfg.algorithm on a freshly constructed tree (size 1). The tree is
/// left in its final state for inspection.
RunReport run_search_with_tree(BeliefTree& tree, const SearchConfig& cfg);

RunReport run_search(const HyperState& root, const SearchConfig& cfg);

}  // namespace bts
