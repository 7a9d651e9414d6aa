#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bts/bounds.hpp"
#include "bts/hyper.hpp"

namespace bts {

/// Which stored per-leaf estimate a backup treats as the leaf value.
enum class LeafValueSource { kLowerMean, kUpperMean };

/**
 * One hyper-state node. Children of an expanded node are contiguous in the
 * arena, one per (action, next state, reward) outcome, at offset
 * a * (2 * n_states) + s_next * 2 + r from first_child.
 */
struct TreeNode {
    std::int64_t id = -1;
    std::int64_t parent = -1;
    std::int64_t first_child = -1;  // -1 while a leaf
    int depth = 0;
    int action_in = -1;  // edge labels, -1/0 at the root
    int reward_in = 0;
    double prob_in = 1.0;  // predictive probability of the edge given the action
    HyperState hyper;
    BoundEstimate lower;
    BoundEstimate upper;
    double backed_lower = 0.0;
    double backed_upper = 0.0;

    bool is_leaf() const { return first_child < 0; }
};

/**
 * Arena-allocated belief tree. Node 0 is the root and ids grow in creation
 * order, so every child id exceeds its parent's and a backup is one reverse
 * sweep over the arena.
 */
class BeliefTree {
public:
    explicit BeliefTree(HyperState root, std::int64_t node_cap = 1000000);

    std::int64_t size() const { return static_cast<std::int64_t>(nodes_.size()); }
    const TreeNode& node(std::int64_t id) const { return nodes_[static_cast<std::size_t>(id)]; }
    TreeNode& node(std::int64_t id) { return nodes_[static_cast<std::size_t>(id)]; }

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }
    double discount() const { return discount_; }
    std::int64_t node_cap() const { return cap_; }

    /// Outcomes per expansion: n_actions * n_states * 2 reward values.
    int branching_factor() const { return n_actions_ * n_states_ * 2; }

    /// Ids of the current leaves, ascending.
    std::vector<std::int64_t> leaf_ids() const;

    /// Grows every (a, s_next, r) child of a leaf and returns the new ids.
    /// Throws resource_error when that would push the arena past the cap.
    std::vector<std::int64_t> expand_node(std::int64_t id);

    std::int64_t child_id(std::int64_t id, int a, int s_next, int r) const;

    /**
     * Backs the tree up under
     *   V(node) = max_a sum_{children c of a} prob_in(c) * (reward_in(c) + discount * V(c)),
     * the immediate reward undiscounted, writing backed_lower or backed_upper
     * everywhere. Returns the root's per-action values. The root must be
     * expanded and every leaf must hold at least one sample of the chosen
     * estimate.
     */
    std::vector<double> backup(LeafValueSource source);

    /// Backup from caller-supplied leaf values; fills backed_upper.
    std::vector<double> backup_upper_with(const std::function<double(const TreeNode&)>& leaf_value);

private:
    std::vector<double> backup_core(const std::function<double(const TreeNode&)>& leaf_value,
                                    bool into_upper);

    std::vector<TreeNode> nodes_;
    std::int64_t cap_ = 0;
    int n_states_ = 0;
    int n_actions_ = 0;
    double discount_ = 0.0;
};

/// Per-root-action value brackets of the horizon-k exhaustive tree.
struct BranchValues {
    std::vector<double> lower;
    std::vector<double> upper;
};

/**
 * Expands every node out to `horizon` and backs up leaf brackets: closed-form
 * bounds when the belief has finite support, the trivial
 * [0, 1/(1 - discount)] bracket otherwise. horizon 0 reduces to the one-step
 * predictive reward per action, with lower == upper.
 */
BranchValues exhaustive_branch_values(const HyperState& root, int horizon,
                                      std::int64_t node_cap = 1000000);

}  // namespace bts
