#include "bts/finite_support.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#include "bts/errors.hpp"

namespace bts {

namespace {

void check_observation(const FiniteSupportBelief& belief, const Transition& obs) {
    if (obs.s < 0 || obs.s >= belief.n_states() || obs.s_next < 0 || obs.s_next >= belief.n_states())
        throw validation_error("observation state out of range");
    if (obs.a < 0 || obs.a >= belief.n_actions()) throw validation_error("observation action out of range");
    if (obs.r != 0 && obs.r != 1) throw validation_error("observation reward must be 0 or 1");
}

// Likelihood of (r, s_next) under candidate k at (s, a).
double outcome_likelihood(const FiniteMDP& mdp, const Transition& obs) {
    double p_reward = obs.r == 1 ? mdp.r(obs.s, obs.a) : 1.0 - mdp.r(obs.s, obs.a);
    return p_reward * mdp.p(obs.s, obs.a, obs.s_next);
}

}  // namespace

FiniteSupportBelief FiniteSupportBelief::from_support(const std::vector<WeightedMdp>& support) {
    if (support.empty()) throw validation_error("finite support must not be empty");
    auto mdps = std::make_shared<std::vector<FiniteMDP>>();
    mdps->reserve(support.size());
    FiniteSupportBelief belief;
    belief.weights.reserve(support.size());
    for (const WeightedMdp& point : support) {
        if (!(point.weight > 0.0)) throw validation_error("support weights must be positive");
        mdps->push_back(point.mdp);
        belief.weights.push_back(point.weight);
    }
    belief.components = std::move(mdps);
    belief.validate();
    return belief;
}

int FiniteSupportBelief::n_states() const { return (*components)[0].n_states; }
int FiniteSupportBelief::n_actions() const { return (*components)[0].n_actions; }
double FiniteSupportBelief::discount() const { return (*components)[0].discount; }

void FiniteSupportBelief::validate() const {
    if (!components || components->empty()) throw validation_error("finite support must not be empty");
    if (weights.size() != components->size())
        throw validation_error("weight count does not match candidate count");
    const FiniteMDP& first = (*components)[0];
    double total = 0.0;
    double largest = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const FiniteMDP& mdp = (*components)[k];
        mdp.validate();
        if (mdp.n_states != first.n_states || mdp.n_actions != first.n_actions)
            throw validation_error("all candidates must share state and action counts");
        if (std::abs(mdp.discount - first.discount) > 1e-12)
            throw validation_error("all candidates must share the discount");
        double w = weights[k];
        if (!(w >= 0.0) || !std::isfinite(w)) throw validation_error("weights must be finite and nonnegative");
        total += w;
        if (w > largest) largest = w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw validation_error("weights must sum to 1");
    if (!(largest > 0.0)) throw validation_error("at least one weight must be positive");
}

std::vector<WeightedMdp> FiniteSupportBelief::support() const {
    std::vector<WeightedMdp> out;
    out.reserve(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] > 0.0) out.push_back({(*components)[k], weights[k]});
    }
    return out;
}

FiniteSupportBelief posterior_update(const FiniteSupportBelief& belief, const Transition& obs) {
    check_observation(belief, obs);
    FiniteSupportBelief out = belief;
    double total = 0.0;
    for (std::size_t k = 0; k < out.weights.size(); ++k) {
        out.weights[k] *= outcome_likelihood((*belief.components)[k], obs);
        total += out.weights[k];
    }
    if (total <= 0.0) return belief;  // impossible outcome, see header
    for (double& w : out.weights) w /= total;
    return out;
}

FiniteMDP mean_mdp(const FiniteSupportBelief& belief) {
    const std::vector<FiniteMDP>& mdps = *belief.components;
    FiniteMDP mean;
    mean.n_states = belief.n_states();
    mean.n_actions = belief.n_actions();
    mean.discount = belief.discount();
    mean.transition.assign(mdps[0].transition.size(), 0.0);
    mean.mean_reward.assign(mdps[0].mean_reward.size(), 0.0);
    for (std::size_t k = 0; k < mdps.size(); ++k) {
        double w = belief.weights[k];
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < mean.transition.size(); ++i) mean.transition[i] += w * mdps[k].transition[i];
        for (std::size_t i = 0; i < mean.mean_reward.size(); ++i)
            mean.mean_reward[i] += w * mdps[k].mean_reward[i];
    }
    return mean;
}

PredictiveDistribution predictive_distribution(const FiniteSupportBelief& belief, int s, int a) {
    if (s < 0 || s >= belief.n_states()) throw validation_error("state out of range");
    if (a < 0 || a >= belief.n_actions()) throw validation_error("action out of range");
    PredictiveDistribution pred;
    pred.n_states = belief.n_states();
    pred.joint.assign(2 * static_cast<std::size_t>(pred.n_states), 0.0);
    for (std::size_t k = 0; k < belief.weights.size(); ++k) {
        double w = belief.weights[k];
        if (w == 0.0) continue;
        const FiniteMDP& mdp = (*belief.components)[k];
        double p1 = mdp.r(s, a);
        for (int s2 = 0; s2 < pred.n_states; ++s2) {
            double ps = mdp.p(s, a, s2);
            pred.joint[s2] += w * (1.0 - p1) * ps;
            pred.joint[static_cast<std::size_t>(pred.n_states) + s2] += w * p1 * ps;
        }
    }
    return pred;
}

FiniteMDP sample_mdp(const FiniteSupportBelief& belief, RngStream& stream) {
    int k = stream.next_categorical(belief.weights);
    return (*belief.components)[static_cast<std::size_t>(k)];
}

}  // namespace bts
