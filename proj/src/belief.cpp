#include "bts/belief.hpp"

#include <cmath>
#include <string>

#include "bts/errors.hpp"

namespace bts {

BeliefState BeliefState::uniform_prior(int n_states, int n_actions, double discount) {
    BeliefState b;
    b.n_states = n_states;
    b.n_actions = n_actions;
    b.discount = discount;
    const std::size_t nsa = static_cast<std::size_t>(n_states) * n_actions;
    b.transition_counts.assign(nsa * n_states, 1.0);
    b.reward_alpha.assign(nsa, 1.0);
    b.reward_beta.assign(nsa, 1.0);
    b.validate();
    return b;
}

double BeliefState::count_sum(int s, int a) const {
    double acc = 0.0;
    for (int s2 = 0; s2 < n_states; ++s2) acc += psi(s, a, s2);
    return acc;
}

void BeliefState::validate() const {
    if (n_states <= 0 || n_actions <= 0)
        throw validation_error("belief needs at least one state and one action");
    if (!(discount >= 0.0) || discount >= 1.0)
        throw validation_error("discount must lie in [0, 1)");
    const std::size_t nsa = static_cast<std::size_t>(n_states) * n_actions;
    if (transition_counts.size() != nsa * n_states)
        throw validation_error("transition count table has wrong size");
    if (reward_alpha.size() != nsa || reward_beta.size() != nsa)
        throw validation_error("reward parameter tables have wrong size");
    for (double c : transition_counts)
        if (!(c > 0.0)) throw validation_error("transition counts must be strictly positive");
    for (std::size_t i = 0; i < nsa; ++i)
        if (!(reward_alpha[i] > 0.0) || !(reward_beta[i] > 0.0))
            throw validation_error("reward parameters must be strictly positive");
}

namespace {

void check_obs(const BeliefState& belief, const Transition& obs) {
    if (obs.s < 0 || obs.s >= belief.n_states || obs.s_next < 0 || obs.s_next >= belief.n_states)
        throw validation_error("observation state out of range");
    if (obs.a < 0 || obs.a >= belief.n_actions)
        throw validation_error("observation action out of range");
    if (obs.r != 0 && obs.r != 1)
        throw validation_error("observation reward must be 0 or 1");
}

}  // namespace

BeliefState posterior_update(const BeliefState& belief, const Transition& obs) {
    check_obs(belief, obs);
    BeliefState out = belief;
    out.psi(obs.s, obs.a, obs.s_next) += 1.0;
    const std::size_t cell = static_cast<std::size_t>(obs.s) * belief.n_actions + obs.a;
    if (obs.r == 1)
        out.reward_alpha[cell] += 1.0;
    else
        out.reward_beta[cell] += 1.0;
    return out;
}

FiniteMDP mean_mdp(const BeliefState& belief) {
    belief.validate();
    FiniteMDP mdp;
    mdp.n_states = belief.n_states;
    mdp.n_actions = belief.n_actions;
    mdp.discount = belief.discount;
    const std::size_t nsa = static_cast<std::size_t>(belief.n_states) * belief.n_actions;
    mdp.transition.assign(nsa * belief.n_states, 0.0);
    mdp.mean_reward.assign(nsa, 0.0);
    for (int s = 0; s < belief.n_states; ++s) {
        for (int a = 0; a < belief.n_actions; ++a) {
            const double total = belief.count_sum(s, a);
            for (int s2 = 0; s2 < belief.n_states; ++s2)
                mdp.p(s, a, s2) = belief.psi(s, a, s2) / total;
            mdp.r(s, a) = belief.alpha(s, a) / (belief.alpha(s, a) + belief.beta(s, a));
        }
    }
    return mdp;
}

PredictiveDistribution predictive_distribution(const BeliefState& belief, int s, int a) {
    if (s < 0 || s >= belief.n_states || a < 0 || a >= belief.n_actions)
        throw validation_error("predictive query out of range");
    PredictiveDistribution out;
    out.n_states = belief.n_states;
    out.joint.assign(2 * static_cast<std::size_t>(belief.n_states), 0.0);
    const double p1 = belief.alpha(s, a) / (belief.alpha(s, a) + belief.beta(s, a));
    const double p0 = 1.0 - p1;
    const double total = belief.count_sum(s, a);
    for (int s2 = 0; s2 < belief.n_states; ++s2) {
        const double ps = belief.psi(s, a, s2) / total;
        out.joint[s2] = p0 * ps;
        out.joint[belief.n_states + s2] = p1 * ps;
    }
    return out;
}

FiniteMDP sample_mdp(const BeliefState& belief, RngStream& stream) {
    belief.validate();
    FiniteMDP mdp;
    mdp.n_states = belief.n_states;
    mdp.n_actions = belief.n_actions;
    mdp.discount = belief.discount;
    const std::size_t nsa = static_cast<std::size_t>(belief.n_states) * belief.n_actions;
    mdp.transition.assign(nsa * belief.n_states, 0.0);
    mdp.mean_reward.assign(nsa, 0.0);
    std::vector<double> alpha(belief.n_states), row(belief.n_states);
    for (int s = 0; s < belief.n_states; ++s) {
        for (int a = 0; a < belief.n_actions; ++a) {
            for (int s2 = 0; s2 < belief.n_states; ++s2) alpha[s2] = belief.psi(s, a, s2);
            stream.next_dirichlet(alpha, row);
            for (int s2 = 0; s2 < belief.n_states; ++s2) mdp.p(s, a, s2) = row[s2];
            mdp.r(s, a) = stream.next_beta(belief.alpha(s, a), belief.beta(s, a));
        }
    }
    return mdp;
}

double dirichlet_step_bound(double n_t, int k) {
    if (!(n_t > 0.0)) throw validation_error("row count must be positive");
    if (k < 0) throw validation_error("step count must be nonnegative");
    return static_cast<double>(k) / (2.0 * (n_t + static_cast<double>(k)));
}

}  // namespace bts
