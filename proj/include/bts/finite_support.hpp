#pragma once

#include <memory>
#include <vector>

#include "bts/belief.hpp"
#include "bts/mdp.hpp"
#include "bts/rng.hpp"

namespace bts {

/// One support point of a finite posterior: a candidate MDP and its weight.
struct WeightedMdp {
    FiniteMDP mdp;
    double weight = 0.0;
};

/**
 * Posterior supported on finitely many candidate MDPs. The candidates are
 * immutable and shared by every node of a search tree; a node owns only its
 * weight vector, so a Bayes update is O(K) and never copies a model.
 */
struct FiniteSupportBelief {
    std::shared_ptr<const std::vector<FiniteMDP>> components;
    std::vector<double> weights;

    /// Validates and shares the candidates; weights must be positive and sum to 1.
    static FiniteSupportBelief from_support(const std::vector<WeightedMdp>& support);

    int n_components() const { return static_cast<int>(weights.size()); }
    int n_states() const;
    int n_actions() const;
    double discount() const;

    void validate() const;

    /// Current support as (mdp, weight) pairs, dropping zero-weight candidates.
    std::vector<WeightedMdp> support() const;
};

/// Belief after observing one transition; the input is untouched. An
/// observation no candidate can produce keeps the weights unchanged (such a
/// child is reached with probability zero, so its belief never matters).
FiniteSupportBelief posterior_update(const FiniteSupportBelief& belief, const Transition& obs);

/// Weight-averaged MDP.
FiniteMDP mean_mdp(const FiniteSupportBelief& belief);

/// Joint over (r, s_next) for one (s, a). Unlike the conjugate case the
/// reward and next state are correlated through the shared candidate index.
PredictiveDistribution predictive_distribution(const FiniteSupportBelief& belief, int s, int a);

/// One candidate drawn by weight, returned by value.
FiniteMDP sample_mdp(const FiniteSupportBelief& belief, RngStream& stream);

}  // namespace bts
