#pragma once

#include <vector>

#include "bts/mdp.hpp"
#include "bts/rng.hpp"

namespace bts {

/// One observed step: action a in state s produced reward r (0 or 1) and
/// landed in s_next.
struct Transition {
    int s = 0;
    int a = 0;
    int r = 0;
    int s_next = 0;
};

/**
 * Joint predictive distribution over the (reward, next state) outcome of one
 * step. Stored as a dense [r][s_next] table so mixture beliefs, whose reward
 * and transition components are correlated, fit the same shape.
 */
struct PredictiveDistribution {
    int n_states = 0;
    std::vector<double> joint;  // joint[r * n_states + s_next]

    double prob(int r, int s_next) const { return joint[static_cast<std::size_t>(r) * n_states + s_next]; }
    double expected_reward() const {
        double acc = 0.0;
        for (int s2 = 0; s2 < n_states; ++s2) acc += joint[n_states + s2];
        return acc;
    }
    double next_state_prob(int s_next) const { return joint[s_next] + joint[n_states + s_next]; }
};

/**
 * Conjugate belief over an unknown finite MDP: an independent Dirichlet over
 * each transition row (transition_counts) and an independent Beta over each
 * Bernoulli reward (reward_alpha / reward_beta). All counts are strictly
 * positive reals. The discount travels with the belief because every MDP it
 * describes shares it.
 */
struct BeliefState {
    int n_states = 0;
    int n_actions = 0;
    double discount = 0.0;
    std::vector<double> transition_counts;  // [s][a][s'], same layout as FiniteMDP
    std::vector<double> reward_alpha;       // [s][a]
    std::vector<double> reward_beta;        // [s][a]

    /// All transition pseudo-counts 1, all reward parameters (1, 1).
    static BeliefState uniform_prior(int n_states, int n_actions, double discount);

    double psi(int s, int a, int s2) const {
        return transition_counts[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double& psi(int s, int a, int s2) {
        return transition_counts[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double alpha(int s, int a) const { return reward_alpha[static_cast<std::size_t>(s) * n_actions + a]; }
    double beta(int s, int a) const { return reward_beta[static_cast<std::size_t>(s) * n_actions + a]; }

    /// Total transition count n(s,a) = sum_s' psi(s,a,s').
    double count_sum(int s, int a) const;

    void validate() const;
};

/// Belief after observing one transition; the input is untouched.
BeliefState posterior_update(const BeliefState& belief, const Transition& obs);

/// MDP of posterior means: normalized counts and alpha/(alpha+beta) rewards.
FiniteMDP mean_mdp(const BeliefState& belief);

/// Marginal predictive over (r, s_next) for one (s, a); the product of the
/// Beta-Bernoulli reward predictive and the Dirichlet-multinomial row predictive.
PredictiveDistribution predictive_distribution(const BeliefState& belief, int s, int a);

/// One MDP drawn from the belief: Dirichlet rows, Beta reward means.
FiniteMDP sample_mdp(const BeliefState& belief, RngStream& stream);

/**
 * How far k further observations of one transition row can move any
 * coordinate of its posterior mean: at most k / (2 * (n_t + k)) where n_t is
 * the current total count of the row.
 */
double dirichlet_step_bound(double n_t, int k);

}  // namespace bts
