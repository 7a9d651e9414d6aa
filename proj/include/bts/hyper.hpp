#pragma once

#include <variant>

#include "bts/belief.hpp"
#include "bts/finite_support.hpp"

namespace bts {

/// A node's posterior over the unknown MDP: conjugate Dirichlet-Beta tables
/// or an explicit finite mixture.
using Belief = std::variant<BeliefState, FiniteSupportBelief>;

/// BAMDP hyper-state: the physical state together with the belief held on
/// arrival. Two nodes with the same state but different histories are
/// different hyper-states.
struct HyperState {
    int state = 0;
    Belief belief;
};

int n_states(const Belief& belief);
int n_actions(const Belief& belief);
double discount(const Belief& belief);
void validate(const Belief& belief);

/// True when the belief admits closed-form value brackets (finite support).
bool exact_bounds_available(const Belief& belief);

Belief posterior_update(const Belief& belief, const Transition& obs);
FiniteMDP mean_mdp(const Belief& belief);
PredictiveDistribution predictive_distribution(const Belief& belief, int s, int a);
FiniteMDP sample_mdp(const Belief& belief, RngStream& stream);

}  // namespace bts
