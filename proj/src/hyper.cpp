#include "bts/hyper.hpp"

namespace bts {

namespace {

int states_of(const BeliefState& b) { return b.n_states; }
int states_of(const FiniteSupportBelief& b) { return b.n_states(); }
int actions_of(const BeliefState& b) { return b.n_actions; }
int actions_of(const FiniteSupportBelief& b) { return b.n_actions(); }
double discount_of(const BeliefState& b) { return b.discount; }
double discount_of(const FiniteSupportBelief& b) { return b.discount(); }

}  // namespace

int n_states(const Belief& belief) {
    return std::visit([](const auto& b) { return states_of(b); }, belief);
}

int n_actions(const Belief& belief) {
    return std::visit([](const auto& b) { return actions_of(b); }, belief);
}

double discount(const Belief& belief) {
    return std::visit([](const auto& b) { return discount_of(b); }, belief);
}

void validate(const Belief& belief) {
    std::visit([](const auto& b) { b.validate(); }, belief);
}

bool exact_bounds_available(const Belief& belief) {
    return std::holds_alternative<FiniteSupportBelief>(belief);
}

Belief posterior_update(const Belief& belief, const Transition& obs) {
    return std::visit([&](const auto& b) -> Belief { return posterior_update(b, obs); }, belief);
}

FiniteMDP mean_mdp(const Belief& belief) {
    return std::visit([](const auto& b) { return mean_mdp(b); }, belief);
}

PredictiveDistribution predictive_distribution(const Belief& belief, int s, int a) {
    return std::visit([&](const auto& b) { return predictive_distribution(b, s, a); }, belief);
}

FiniteMDP sample_mdp(const Belief& belief, RngStream& stream) {
    return std::visit([&](const auto& b) { return sample_mdp(b, stream); }, belief);
}

}  // namespace bts
