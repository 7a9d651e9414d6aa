#include "bts/tree.hpp"

#include <utility>

#include "bts/errors.hpp"

namespace bts {

BeliefTree::BeliefTree(HyperState root, std::int64_t node_cap) : cap_(node_cap) {
    if (node_cap < 1) throw validation_error("node cap must be positive");
    validate(root.belief);
    n_states_ = bts::n_states(root.belief);
    n_actions_ = bts::n_actions(root.belief);
    discount_ = bts::discount(root.belief);
    if (root.state < 0 || root.state >= n_states_) throw validation_error("root state out of range");
    TreeNode node;
    node.id = 0;
    node.hyper = std::move(root);
    nodes_.push_back(std::move(node));
}

std::vector<std::int64_t> BeliefTree::leaf_ids() const {
    std::vector<std::int64_t> out;
    for (const TreeNode& node : nodes_)
        if (node.is_leaf()) out.push_back(node.id);
    return out;
}

std::int64_t BeliefTree::child_id(std::int64_t id, int a, int s_next, int r) const {
    const TreeNode& parent = node(id);
    if (parent.is_leaf()) throw state_error("leaf has no children");
    if (a < 0 || a >= n_actions_ || s_next < 0 || s_next >= n_states_ || (r != 0 && r != 1))
        throw validation_error("child outcome out of range");
    return parent.first_child + (static_cast<std::int64_t>(a) * n_states_ + s_next) * 2 + r;
}

std::vector<std::int64_t> BeliefTree::expand_node(std::int64_t id) {
    if (id < 0 || id >= size()) throw validation_error("node id out of range");
    if (!nodes_[static_cast<std::size_t>(id)].is_leaf()) throw state_error("node is already expanded");
    if (size() + branching_factor() > cap_) throw resource_error("node cap exceeded");

    std::int64_t first = size();
    nodes_[static_cast<std::size_t>(id)].first_child = first;
    std::vector<std::int64_t> created;
    created.reserve(static_cast<std::size_t>(branching_factor()));
    // Parent fields are re-read by value each iteration: push_back may move the arena.
    int parent_state = nodes_[static_cast<std::size_t>(id)].hyper.state;
    int parent_depth = nodes_[static_cast<std::size_t>(id)].depth;

    for (int a = 0; a < n_actions_; ++a) {
        PredictiveDistribution pred =
            predictive_distribution(nodes_[static_cast<std::size_t>(id)].hyper.belief, parent_state, a);
        for (int s2 = 0; s2 < n_states_; ++s2) {
            for (int r = 0; r < 2; ++r) {
                Transition obs{parent_state, a, r, s2};
                TreeNode child;
                child.id = size();
                child.parent = id;
                child.depth = parent_depth + 1;
                child.action_in = a;
                child.reward_in = r;
                child.prob_in = pred.prob(r, s2);
                child.hyper.state = s2;
                child.hyper.belief =
                    posterior_update(nodes_[static_cast<std::size_t>(id)].hyper.belief, obs);
                created.push_back(child.id);
                nodes_.push_back(std::move(child));
            }
        }
    }
    return created;
}

std::vector<double> BeliefTree::backup(LeafValueSource source) {
    bool into_upper = source == LeafValueSource::kUpperMean;
    return backup_core(
        [into_upper](const TreeNode& leaf) {
            return into_upper ? leaf.upper.mean() : leaf.lower.mean();
        },
        into_upper);
}

std::vector<double> BeliefTree::backup_upper_with(
    const std::function<double(const TreeNode&)>& leaf_value) {
    return backup_core(leaf_value, true);
}

std::vector<double> BeliefTree::backup_core(
    const std::function<double(const TreeNode&)>& leaf_value, bool into_upper) {
    if (nodes_[0].is_leaf()) throw state_error("backup needs an expanded root");

    for (std::int64_t id = size() - 1; id >= 0; --id) {
        TreeNode& node = nodes_[static_cast<std::size_t>(id)];
        double value;
        if (node.is_leaf()) {
            value = leaf_value(node);
        } else {
            value = 0.0;
            for (int a = 0; a < n_actions_; ++a) {
                double q = 0.0;
                for (int s2 = 0; s2 < n_states_; ++s2) {
                    for (int r = 0; r < 2; ++r) {
                        const TreeNode& child =
                            nodes_[static_cast<std::size_t>(child_id(id, a, s2, r))];
                        double backed = into_upper ? child.backed_upper : child.backed_lower;
                        q += child.prob_in * (r + discount_ * backed);
                    }
                }
                if (a == 0 || q > value) value = q;
            }
        }
        if (into_upper)
            node.backed_upper = value;
        else
            node.backed_lower = value;
    }

    std::vector<double> root_values(static_cast<std::size_t>(n_actions_), 0.0);
    for (int a = 0; a < n_actions_; ++a) {
        double q = 0.0;
        for (int s2 = 0; s2 < n_states_; ++s2) {
            for (int r = 0; r < 2; ++r) {
                const TreeNode& child = nodes_[static_cast<std::size_t>(child_id(0, a, s2, r))];
                double backed = into_upper ? child.backed_upper : child.backed_lower;
                q += child.prob_in * (r + discount_ * backed);
            }
        }
        root_values[static_cast<std::size_t>(a)] = q;
    }
    return root_values;
}

BranchValues exhaustive_branch_values(const HyperState& root, int horizon, std::int64_t node_cap) {
    if (horizon < 0) throw validation_error("horizon must be nonnegative");
    validate(root.belief);
    int actions = n_actions(root.belief);

    if (horizon == 0) {
        BranchValues out;
        out.lower.reserve(static_cast<std::size_t>(actions));
        for (int a = 0; a < actions; ++a) {
            PredictiveDistribution pred = predictive_distribution(root.belief, root.state, a);
            out.lower.push_back(pred.expected_reward());
        }
        out.upper = out.lower;
        return out;
    }

    BeliefTree tree(root, node_cap);
    std::int64_t level_begin = 0;
    std::int64_t level_end = tree.size();
    for (int d = 0; d < horizon; ++d) {
        for (std::int64_t id = level_begin; id < level_end; ++id) tree.expand_node(id);
        level_begin = level_end;
        level_end = tree.size();
    }

    bool closed_form = exact_bounds_available(root.belief);
    double padding = 1.0 / (1.0 - tree.discount());
    for (std::int64_t id = level_begin; id < level_end; ++id) {
        TreeNode& leaf = tree.node(id);
        if (closed_form) {
            auto [lo, hi] = exact_bounds(leaf.hyper);
            leaf.lower.add(lo);
            leaf.upper.add(hi);
        } else {
            leaf.lower.add(0.0);
            leaf.upper.add(padding);
        }
    }

    BranchValues out;
    out.lower = tree.backup(LeafValueSource::kLowerMean);
    out.upper = tree.backup(LeafValueSource::kUpperMean);
    return out;
}

}  // namespace bts
