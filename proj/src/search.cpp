#include "bts/search.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "bts/errors.hpp"

namespace bts {

void SearchConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw validation_error("epsilon must be positive");
    if (budget < 1) throw validation_error("budget must be at least 1");
    if (m < 0) throw validation_error("m must be nonnegative");
    if (final_lower_samples < 1) throw validation_error("final_lower_samples must be at least 1");
    if (node_cap < 1) throw validation_error("node cap must be positive");
}

int depth_for_accuracy(double gamma, double ratio) {
    if (!(gamma >= 0.0) || !(gamma < 1.0)) throw validation_error("discount must be in [0, 1)");
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw validation_error("ratio must be positive");
    if (ratio >= 1.0) return 0;
    if (gamma == 0.0) return 1;
    // The 1e-9 slack keeps exact powers of gamma from rounding up one level.
    double k = std::ceil(std::log(ratio) / std::log(gamma) - 1e-9);
    return k < 0.0 ? 0 : static_cast<int>(k);
}

std::int64_t uniform_tree_nodes(std::int64_t phi, int k) {
    if (phi < 1) throw validation_error("branching factor must be positive");
    if (k < 0) throw validation_error("depth must be nonnegative");
    constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
    std::int64_t total = 0;
    std::int64_t level = 1;
    for (int j = 1; j <= k; ++j) {
        if (level > kMax / phi) return kMax;
        level *= phi;
        if (total > kMax - level) return kMax;
        total += level;
    }
    return total;
}

int flat_stochastic_samples(double gamma, double epsilon, std::int64_t phi) {
    if (phi < 2) throw validation_error("branching factor must be at least 2");
    int k = depth_for_accuracy(gamma, epsilon / (2.0 * value_bound(gamma)));
    double m = std::ceil(2.0 * k * std::log(static_cast<double>(phi)));
    return m < 1.0 ? 1 : static_cast<int>(m);
}

double window_estimate(const BeliefTree& tree, std::int64_t leaf_id) {
    const TreeNode& leaf = tree.node(leaf_id);
    int window_low = (leaf.depth + 1) / 2;  // ceil(depth / 2)
    double sum = 0.0;
    std::int64_t count = 0;
    for (std::int64_t id = leaf_id; id >= 0 && tree.node(id).depth >= window_low;
         id = tree.node(id).parent) {
        sum += tree.node(id).upper.sum;
        count += tree.node(id).upper.count();
    }
    if (count == 0) throw state_error("sample window is empty");
    return sum / static_cast<double>(count);
}

namespace {

constexpr std::uint64_t kDescentTag = ~std::uint64_t{0};

// Draw-index keying: even indices are upper draws, odd are lower draws, so
// the two kinds never share a stream at the same node.
RngStream upper_stream(std::uint64_t seed, std::int64_t node, int j) {
    return RngStream::keyed(seed, static_cast<std::uint64_t>(node), 2 * static_cast<std::uint64_t>(j));
}

RngStream lower_stream(std::uint64_t seed, std::int64_t node, int j) {
    return RngStream::keyed(seed, static_cast<std::uint64_t>(node),
                            2 * static_cast<std::uint64_t>(j) + 1);
}

void audit(RunReport& report, const SearchConfig& cfg, std::int64_t iteration, char kind,
           std::int64_t node_id, double value) {
    if (cfg.record_audit) report.audit.push_back({iteration, kind, node_id, value});
}

int argmax_lowest(const std::vector<double>& values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i)
        if (values[i] > values[static_cast<std::size_t>(best)]) best = i;
    return best;
}

/// Best root value minus second best; infinite when there is no competitor.
double lead_margin(const std::vector<double>& values) {
    if (values.size() < 2) return std::numeric_limits<double>::infinity();
    double best = -std::numeric_limits<double>::infinity();
    double second = best;
    for (double v : values) {
        if (v > best) {
            second = best;
            best = v;
        } else if (v > second) {
            second = v;
        }
    }
    return best - second;
}

void run_flat_oracle(BeliefTree& tree, const SearchConfig& cfg, RunReport& report) {
    if (!exact_bounds_available(tree.node(0).hyper.belief))
        throw capability_error("the oracle sweep needs a finite-support belief");
    double gamma = tree.discount();
    double beta = value_bound(gamma);
    std::int64_t phi = tree.branching_factor();
    int k = depth_for_accuracy(gamma, cfg.epsilon / beta);
    int sweep_depth = k < 1 ? 1 : k;

    std::vector<double> lower_q;
    std::int64_t begin = 0;
    std::int64_t end = tree.size();
    std::int64_t level_size = 1;
    for (int d = 1; d <= sweep_depth; ++d) {
        if (level_size > std::numeric_limits<std::int64_t>::max() / phi)
            throw resource_error("oracle sweep overflows the evaluation budget");
        level_size *= phi;
        if (level_size > cfg.budget - report.leaf_evaluations)
            throw resource_error("budget too small for the oracle sweep");
        if (level_size > tree.node_cap() - tree.size()) throw resource_error("node cap exceeded");

        for (std::int64_t id = begin; id < end; ++id) {
            tree.expand_node(id);
            ++report.node_expansions;
            audit(report, cfg, d, 'x', id, 0.0);
        }
        begin = end;
        end = tree.size();
        for (std::int64_t id = begin; id < end; ++id) {
            TreeNode& leaf = tree.node(id);
            auto [lo, hi] = exact_bounds(leaf.hyper);
            leaf.lower.add(lo);
            leaf.upper.add(hi);
            ++report.leaf_evaluations;
            audit(report, cfg, d, 'l', id, lo);
            audit(report, cfg, d, 'u', id, hi);
        }
        lower_q = tree.backup(LeafValueSource::kLowerMean);
        if (lead_margin(lower_q) > 2.0 * beta * std::pow(gamma, d)) break;
    }
    report.chosen_branch = argmax_lowest(lower_q);
}

void run_flat_stochastic(BeliefTree& tree, const SearchConfig& cfg, RunReport& report) {
    double gamma = tree.discount();
    double beta = value_bound(gamma);
    std::int64_t phi = tree.branching_factor();
    int k = depth_for_accuracy(gamma, cfg.epsilon / (2.0 * beta));
    int sweep_depth = k < 1 ? 1 : k;
    int m = cfg.m > 0 ? cfg.m : flat_stochastic_samples(gamma, cfg.epsilon, phi);

    std::int64_t leaf_count = 1;
    for (int d = 0; d < sweep_depth; ++d) {
        if (leaf_count > std::numeric_limits<std::int64_t>::max() / phi)
            throw resource_error("sweep overflows the evaluation budget");
        leaf_count *= phi;
    }
    if (leaf_count > cfg.budget / m) throw resource_error("budget below m * phi^k");
    if (uniform_tree_nodes(phi, sweep_depth) > tree.node_cap() - 1)
        throw resource_error("node cap exceeded");

    std::int64_t begin = 0;
    std::int64_t end = tree.size();
    for (int d = 1; d <= sweep_depth; ++d) {
        for (std::int64_t id = begin; id < end; ++id) {
            tree.expand_node(id);
            ++report.node_expansions;
            audit(report, cfg, d, 'x', id, 0.0);
        }
        begin = end;
        end = tree.size();
    }

    for (std::int64_t id = begin; id < end; ++id) {
        TreeNode& leaf = tree.node(id);
        Policy pinned = mean_policy(leaf.hyper);
        for (int j = 0; j < m; ++j) {
            RngStream stream = lower_stream(cfg.seed, id, j);
            double v = sample_lower(leaf.hyper, pinned, stream);
            leaf.lower.add(v);
            ++report.leaf_evaluations;
            audit(report, cfg, sweep_depth, 'l', id, v);
        }
    }
    report.chosen_branch = argmax_lowest(tree.backup(LeafValueSource::kLowerMean));
}

/// Lower-bound commit pass shared by the tree policies: final_lower_samples
/// draws per frontier leaf (on top of the budget), then a lower backup picks
/// the branch. Audit records carry iteration -1.
void commit_pass(BeliefTree& tree, const SearchConfig& cfg, RunReport& report) {
    for (std::int64_t id : tree.leaf_ids()) {
        TreeNode& leaf = tree.node(id);
        Policy pinned = mean_policy(leaf.hyper);
        for (int j = 0; j < cfg.final_lower_samples; ++j) {
            RngStream stream = lower_stream(cfg.seed, id, j);
            double v = sample_lower(leaf.hyper, pinned, stream);
            leaf.lower.add(v);
            ++report.leaf_evaluations;
            audit(report, cfg, -1, 'l', id, v);
        }
    }
    report.chosen_branch = argmax_lowest(tree.backup(LeafValueSource::kLowerMean));
}

void run_sbb1(BeliefTree& tree, const SearchConfig& cfg, RunReport& report) {
    tree.expand_node(0);
    ++report.node_expansions;
    audit(report, cfg, 0, 'x', 0, 0.0);

    std::int64_t iteration = 0;
    while (true) {
        std::int64_t remaining = cfg.budget - report.leaf_evaluations;
        if (remaining <= 0) break;
        ++iteration;

        std::vector<std::int64_t> leaves = tree.leaf_ids();
        for (std::int64_t id : leaves) {
            TreeNode& leaf = tree.node(id);
            RngStream stream = upper_stream(cfg.seed, id, leaf.upper.count());
            double v = sample_upper(leaf.hyper, stream);
            leaf.upper.add(v);
            ++report.leaf_evaluations;
            audit(report, cfg, iteration, 'u', id, v);
        }
        // A pass that crossed the budget line still finishes, but its
        // expansion is skipped.
        if (static_cast<std::int64_t>(leaves.size()) > remaining) break;

        std::int64_t best = leaves[0];
        double best_mean = tree.node(best).upper.mean();
        for (std::int64_t id : leaves) {
            double mv = tree.node(id).upper.mean();
            if (mv > best_mean) {
                best = id;
                best_mean = mv;
            }
        }
        tree.expand_node(best);
        ++report.node_expansions;
        audit(report, cfg, iteration, 'x', best, best_mean);
    }
    commit_pass(tree, cfg, report);
}

void run_sbb2(BeliefTree& tree, const SearchConfig& cfg, RunReport& report) {
    std::int64_t phi = tree.branching_factor();
    std::vector<std::int64_t> children = tree.expand_node(0);
    ++report.node_expansions;
    audit(report, cfg, 0, 'x', 0, 0.0);
    for (std::int64_t id : children) {
        TreeNode& child = tree.node(id);
        RngStream stream = upper_stream(cfg.seed, id, 0);
        double v = sample_upper(child.hyper, stream);
        child.upper.add(v);
        ++report.leaf_evaluations;
        audit(report, cfg, 0, 'u', id, v);
    }

    std::int64_t iteration = 0;
    while (true) {
        std::int64_t remaining = cfg.budget - report.leaf_evaluations;
        if (remaining < 1) break;
        ++iteration;

        tree.backup_upper_with(
            [&tree](const TreeNode& leaf) { return window_estimate(tree, leaf.id); });

        RngStream walk = RngStream::keyed(cfg.seed, static_cast<std::uint64_t>(iteration), kDescentTag);
        std::int64_t cur = 0;
        std::vector<double> outcome_probs(static_cast<std::size_t>(tree.n_states()) * 2);
        while (!tree.node(cur).is_leaf()) {
            int best_a = 0;
            double best_q = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < tree.n_actions(); ++a) {
                double q = 0.0;
                for (int s2 = 0; s2 < tree.n_states(); ++s2) {
                    for (int r = 0; r < 2; ++r) {
                        const TreeNode& child = tree.node(tree.child_id(cur, a, s2, r));
                        q += child.prob_in * child.backed_upper;
                    }
                }
                if (q > best_q) {
                    best_q = q;
                    best_a = a;
                }
            }
            for (int s2 = 0; s2 < tree.n_states(); ++s2)
                for (int r = 0; r < 2; ++r)
                    outcome_probs[static_cast<std::size_t>(s2) * 2 + r] =
                        tree.node(tree.child_id(cur, best_a, s2, r)).prob_in;
            int pick = walk.next_categorical(outcome_probs);
            cur = tree.child_id(cur, best_a, pick / 2, pick % 2);
        }

        TreeNode& leaf = tree.node(cur);
        RngStream stream = upper_stream(cfg.seed, cur, leaf.upper.count());
        double v = sample_upper(leaf.hyper, stream);
        leaf.upper.add(v);
        ++report.leaf_evaluations;
        audit(report, cfg, iteration, 'u', cur, v);

        if (remaining < 1 + phi) break;  // no room for an expansion round

        std::vector<std::int64_t> grown = tree.expand_node(cur);
        ++report.node_expansions;
        audit(report, cfg, iteration, 'x', cur, tree.node(cur).backed_upper);
        for (std::int64_t id : grown) {
            TreeNode& child = tree.node(id);
            RngStream child_stream = upper_stream(cfg.seed, id, 0);
            double cv = sample_upper(child.hyper, child_stream);
            child.upper.add(cv);
            ++report.leaf_evaluations;
            audit(report, cfg, iteration, 'u', id, cv);
        }
    }
    commit_pass(tree, cfg, report);
}

}  // namespace

RunReport run_search_with_tree(BeliefTree& tree, const SearchConfig& cfg) {
    cfg.validate();
    if (tree.size() != 1) throw state_error("search needs a freshly constructed tree");

    auto start = std::chrono::steady_clock::now();
    RunReport report;
    switch (cfg.algorithm) {
        case Algorithm::kFlatOracle:
            run_flat_oracle(tree, cfg, report);
            break;
        case Algorithm::kFlatStochastic:
            run_flat_stochastic(tree, cfg, report);
            break;
        case Algorithm::kSbb1:
            run_sbb1(tree, cfg, report);
            break;
        case Algorithm::kSbb2:
            run_sbb2(tree, cfg, report);
            break;
    }
    for (std::int64_t id = 0; id < tree.size(); ++id)
        if (tree.node(id).depth > report.max_depth_reached)
            report.max_depth_reached = tree.node(id).depth;
    auto end = std::chrono::steady_clock::now();
    report.wallclock_ms = std::chrono::duration<double, std::milli>(end - start).count();
    return report;
}

RunReport run_search(const HyperState& root, const SearchConfig& cfg) {
    cfg.validate();
    BeliefTree tree(root, cfg.node_cap);
    return run_search_with_tree(tree, cfg);
}

}  // namespace bts
