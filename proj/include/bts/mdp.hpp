#pragma once

#include <vector>

namespace bts {

/**
 * Finite MDP with Bernoulli {0,1} rewards described by their means.
 *
 * Tables are flattened row-major: transition[(s * n_actions + a) * n_states + s2],
 * mean_reward[s * n_actions + a]. Transition rows must sum to 1 within 1e-12,
 * rewards must lie in [0,1], and discount in [0,1).
 */
struct FiniteMDP {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transition;
    std::vector<double> mean_reward;
    double discount = 0.0;

    double p(int s, int a, int s2) const {
        return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double& p(int s, int a, int s2) {
        return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double r(int s, int a) const { return mean_reward[static_cast<std::size_t>(s) * n_actions + a]; }
    double& r(int s, int a) { return mean_reward[static_cast<std::size_t>(s) * n_actions + a]; }

    /// Throws validation_error on malformed tables.
    void validate() const;
};

/// Deterministic stationary policy: one action per state.
struct Policy {
    std::vector<int> action_of;
};

struct ValueFunction {
    std::vector<double> value_of;
};

struct SolveResult {
    ValueFunction value;
    Policy policy;
    int sweeps = 0;
};

/// Action value r(s,a) + discount * sum_s' p(s'|s,a) v(s').
double q_value(const FiniteMDP& mdp, const ValueFunction& v, int s, int a);

/**
 * Value iteration from v = 0 until the sup-norm change drops to
 * tol * (1 - discount) / (2 * discount), which puts the result within tol of
 * the fixed point. Greedy ties take the lowest action index.
 */
SolveResult value_iteration(const FiniteMDP& mdp, double tol = 1e-9);

/// Exact policy value by solving (I - discount * P_pi) v = r_pi.
ValueFunction policy_evaluation(const FiniteMDP& mdp, const Policy& pi);

/**
 * Sup-norm sensitivity of the optimal value to model error: an epsilon
 * perturbation of both the rewards and the transition rows moves the optimal
 * value by at most epsilon / (1 - gamma)^2.
 */
double perturbation_gap(double epsilon, double gamma);

}  // namespace bts
