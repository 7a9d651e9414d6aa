#include "bts/bounds.hpp"

#include <cstddef>

#include "bts/errors.hpp"

namespace bts {

void BoundEstimate::add(double v) {
    samples.push_back(v);
    sum += v;
}

double BoundEstimate::mean() const {
    if (samples.empty()) throw state_error("bound estimate has no samples");
    return sum / static_cast<double>(samples.size());
}

namespace {

void check_state(const HyperState& hyper) {
    if (hyper.state < 0 || hyper.state >= n_states(hyper.belief))
        throw validation_error("hyper-state state out of range");
}

}  // namespace

Policy mean_policy(const HyperState& hyper) {
    check_state(hyper);
    return value_iteration(mean_mdp(hyper.belief)).policy;
}

double sample_upper(const HyperState& hyper, RngStream& stream) {
    check_state(hyper);
    FiniteMDP mdp = sample_mdp(hyper.belief, stream);
    return value_iteration(mdp).value.value_of[static_cast<std::size_t>(hyper.state)];
}

double sample_lower(const HyperState& hyper, const Policy& pinned, RngStream& stream) {
    check_state(hyper);
    if (static_cast<int>(pinned.action_of.size()) != n_states(hyper.belief))
        throw validation_error("pinned policy does not cover every state");
    FiniteMDP mdp = sample_mdp(hyper.belief, stream);
    return policy_evaluation(mdp, pinned).value_of[static_cast<std::size_t>(hyper.state)];
}

std::pair<BoundEstimate, BoundEstimate> estimate_bounds(const HyperState& hyper, int m,
                                                        const RngStream& node_stream) {
    check_state(hyper);
    if (m < 1) throw validation_error("estimate_bounds needs at least one draw");
    Policy pinned = mean_policy(hyper);
    BoundEstimate lower;
    BoundEstimate upper;
    auto state = static_cast<std::size_t>(hyper.state);
    for (int j = 0; j < m; ++j) {
        RngStream draw = node_stream.substream(static_cast<std::uint64_t>(j));
        FiniteMDP mdp = sample_mdp(hyper.belief, draw);
        upper.add(value_iteration(mdp).value.value_of[state]);
        lower.add(policy_evaluation(mdp, pinned).value_of[state]);
    }
    return {lower, upper};
}

std::pair<double, double> exact_bounds(int state, const std::vector<WeightedMdp>& finite_support) {
    FiniteSupportBelief belief = FiniteSupportBelief::from_support(finite_support);
    if (state < 0 || state >= belief.n_states()) throw validation_error("state out of range");
    auto s = static_cast<std::size_t>(state);

    double upper = 0.0;
    for (const WeightedMdp& point : finite_support)
        upper += point.weight * value_iteration(point.mdp).value.value_of[s];

    Policy pinned = value_iteration(mean_mdp(belief)).policy;
    double lower = 0.0;
    for (const WeightedMdp& point : finite_support)
        lower += point.weight * policy_evaluation(point.mdp, pinned).value_of[s];

    return {lower, upper};
}

std::pair<double, double> exact_bounds(const HyperState& hyper) {
    const auto* mixture = std::get_if<FiniteSupportBelief>(&hyper.belief);
    if (mixture == nullptr) throw capability_error("exact bounds need a finite-support belief");
    return exact_bounds(hyper.state, mixture->support());
}

}  // namespace bts
