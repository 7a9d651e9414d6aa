#include <doctest.h>

#include <cmath>
#include <vector>

#include "bts/errors.hpp"
#include "bts/finite_support.hpp"
#include "bts/rng.hpp"

using bts::FiniteMDP;
using bts::FiniteSupportBelief;
using bts::RngStream;
using bts::Transition;
using bts::WeightedMdp;

namespace {

// Two-armed bandit candidate: one state, arm rewards (r0, r1).
FiniteMDP bandit(double r0, double r1, double gamma) {
    FiniteMDP m;
    m.n_states = 1;
    m.n_actions = 2;
    m.transition = {1.0, 1.0};
    m.mean_reward = {r0, r1};
    m.discount = gamma;
    return m;
}

FiniteMDP two_state(double p00_a0, double p00_a1, double r0, double r1, double gamma) {
    FiniteMDP m;
    m.n_states = 2;
    m.n_actions = 2;
    m.transition = {p00_a0, 1.0 - p00_a0, p00_a1, 1.0 - p00_a1,
                    0.5, 0.5, 0.5, 0.5};
    m.mean_reward = {r0, r1, 0.5, 0.5};
    m.discount = gamma;
    return m;
}

}  // namespace

TEST_CASE("from_support validates its inputs") {
    CHECK_THROWS_AS(FiniteSupportBelief::from_support({}), bts::validation_error);

    std::vector<WeightedMdp> support = {{bandit(0.8, 0.2, 0.9), 0.5},
                                        {bandit(0.2, 0.8, 0.9), 0.5}};
    CHECK_NOTHROW(FiniteSupportBelief::from_support(support));

    auto bad_weight = support;
    bad_weight[0].weight = 0.0;
    CHECK_THROWS_AS(FiniteSupportBelief::from_support(bad_weight), bts::validation_error);

    auto bad_sum = support;
    bad_sum[0].weight = 0.6;
    bad_sum[1].weight = 0.6;
    CHECK_THROWS_AS(FiniteSupportBelief::from_support(bad_sum), bts::validation_error);

    auto bad_dims = support;
    bad_dims[1].mdp = two_state(0.5, 0.5, 0.5, 0.5, 0.9);
    CHECK_THROWS_AS(FiniteSupportBelief::from_support(bad_dims), bts::validation_error);

    auto bad_gamma = support;
    bad_gamma[1].mdp.discount = 0.5;
    CHECK_THROWS_AS(FiniteSupportBelief::from_support(bad_gamma), bts::validation_error);
}

TEST_CASE("posterior reweighting follows Bayes rule by hand") {
    // Candidates disagree on P(s'=0 | s=0, a=0): 0.9 versus 0.3. Observing
    // that transition with reward 0 multiplies weights by likelihoods
    // (1 - r) * p00 and renormalizes.
    const FiniteMDP a = two_state(0.9, 0.5, 0.25, 0.5, 0.9);
    const FiniteMDP b = two_state(0.3, 0.5, 0.75, 0.5, 0.9);
    const FiniteSupportBelief prior =
        FiniteSupportBelief::from_support({{a, 0.4}, {b, 0.6}});

    Transition obs{0, 0, 0, 0};
    const FiniteSupportBelief post = bts::posterior_update(prior, obs);

    const double la = 0.75 * 0.9;
    const double lb = 0.25 * 0.3;
    const double z = 0.4 * la + 0.6 * lb;
    CHECK(post.weights[0] == doctest::Approx(0.4 * la / z).epsilon(1e-12));
    CHECK(post.weights[1] == doctest::Approx(0.6 * lb / z).epsilon(1e-12));
    CHECK(post.weights[0] + post.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
    // Prior untouched, candidates shared.
    CHECK(prior.weights[0] == doctest::Approx(0.4));
    CHECK(post.components.get() == prior.components.get());
}

TEST_CASE("an impossible observation leaves the weights unchanged") {
    const FiniteMDP a = two_state(1.0, 0.5, 0.0, 0.5, 0.9);
    const FiniteMDP b = two_state(1.0, 0.5, 0.0, 0.5, 0.9);
    const FiniteSupportBelief prior =
        FiniteSupportBelief::from_support({{a, 0.7}, {b, 0.3}});
    // No candidate can emit reward 1 from (s=0, a=0) or reach state 1.
    Transition obs{0, 0, 1, 1};
    const FiniteSupportBelief post = bts::posterior_update(prior, obs);
    CHECK(post.weights[0] == doctest::Approx(0.7));
    CHECK(post.weights[1] == doctest::Approx(0.3));
}

TEST_CASE("mean MDP is the weight-averaged model") {
    const FiniteMDP a = bandit(0.8, 0.2, 0.9);
    const FiniteMDP b = bandit(0.2, 0.6, 0.9);
    const FiniteSupportBelief belief =
        FiniteSupportBelief::from_support({{a, 0.25}, {b, 0.75}});
    const FiniteMDP mean = bts::mean_mdp(belief);
    CHECK(mean.r(0, 0) == doctest::Approx(0.25 * 0.8 + 0.75 * 0.2).epsilon(1e-15));
    CHECK(mean.r(0, 1) == doctest::Approx(0.25 * 0.2 + 0.75 * 0.6).epsilon(1e-15));
    CHECK(mean.p(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("predictive joint correlates reward and next state through the candidate") {
    // Candidate A: always reward 1, always to state 0. Candidate B: always
    // reward 0, always to state 1. The joint puts no mass on the cross terms,
    // so it cannot be the product of its marginals.
    const FiniteMDP a = two_state(1.0, 0.5, 1.0, 0.5, 0.9);
    const FiniteMDP b = two_state(0.0, 0.5, 0.0, 0.5, 0.9);
    const FiniteSupportBelief belief =
        FiniteSupportBelief::from_support({{a, 0.5}, {b, 0.5}});
    const auto pred = bts::predictive_distribution(belief, 0, 0);
    CHECK(pred.prob(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pred.prob(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pred.prob(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pred.prob(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    const double product = pred.expected_reward() * pred.next_state_prob(0);
    CHECK(std::fabs(pred.prob(1, 0) - product) > 0.2);
}

TEST_CASE("predictive matches the weighted average of candidate predictives") {
    const FiniteMDP a = two_state(0.7, 0.4, 0.3, 0.9, 0.9);
    const FiniteMDP b = two_state(0.2, 0.8, 0.6, 0.1, 0.9);
    const double wa = 0.35, wb = 0.65;
    const FiniteSupportBelief belief =
        FiniteSupportBelief::from_support({{a, wa}, {b, wb}});
    for (int s = 0; s < 2; ++s) {
        for (int act = 0; act < 2; ++act) {
            const auto pred = bts::predictive_distribution(belief, s, act);
            for (int r = 0; r < 2; ++r) {
                for (int s2 = 0; s2 < 2; ++s2) {
                    const double ra = r == 1 ? a.r(s, act) : 1.0 - a.r(s, act);
                    const double rb = r == 1 ? b.r(s, act) : 1.0 - b.r(s, act);
                    const double expect = wa * ra * a.p(s, act, s2) + wb * rb * b.p(s, act, s2);
                    CHECK(pred.prob(r, s2) == doctest::Approx(expect).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("sampling frequencies track the weights") {
    const FiniteMDP a = bandit(0.8, 0.2, 0.9);
    const FiniteMDP b = bandit(0.2, 0.6, 0.9);
    const FiniteSupportBelief belief =
        FiniteSupportBelief::from_support({{a, 0.3}, {b, 0.7}});
    RngStream rng = RngStream::keyed(301, 0);
    int hits_a = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        RngStream draw = rng.substream(i);
        const FiniteMDP m = bts::sample_mdp(belief, draw);
        if (m.r(0, 0) == doctest::Approx(0.8)) ++hits_a;
    }
    const double se = std::sqrt(0.3 * 0.7 / n);
    CHECK(std::fabs(double(hits_a) / n - 0.3) <= 3.0 * se);
}

TEST_CASE("support drops candidates whose weight has vanished") {
    const FiniteMDP a = two_state(1.0, 0.5, 0.5, 0.5, 0.9);
    const FiniteMDP b = two_state(0.0, 0.5, 0.5, 0.5, 0.9);
    FiniteSupportBelief belief = FiniteSupportBelief::from_support({{a, 0.5}, {b, 0.5}});
    // Observing s=0 -> s=0 under a=0 is impossible for candidate B.
    Transition obs{0, 0, 0, 0};
    const FiniteSupportBelief post = bts::posterior_update(belief, obs);
    const auto support = post.support();
    REQUIRE(support.size() == 1);
    CHECK(support[0].weight == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(support[0].mdp.p(0, 0, 0) == doctest::Approx(1.0));
}
