#include "bts/mdp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "bts/errors.hpp"

namespace bts {

void FiniteMDP::validate() const {
    if (n_states <= 0 || n_actions <= 0)
        throw validation_error("mdp needs at least one state and one action");
    if (!(discount >= 0.0) || discount >= 1.0)
        throw validation_error("discount must lie in [0, 1)");
    const std::size_t nsa = static_cast<std::size_t>(n_states) * n_actions;
    if (transition.size() != nsa * n_states)
        throw validation_error("transition table has wrong size");
    if (mean_reward.size() != nsa)
        throw validation_error("reward table has wrong size");
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            double row = 0.0;
            for (int s2 = 0; s2 < n_states; ++s2) {
                const double v = p(s, a, s2);
                if (!(v >= 0.0))
                    throw validation_error("negative transition probability at state " +
                                           std::to_string(s));
                row += v;
            }
            if (std::abs(row - 1.0) > 1e-12)
                throw validation_error("transition row does not sum to 1 at state " +
                                       std::to_string(s) + ", action " + std::to_string(a));
            const double rv = r(s, a);
            if (!(rv >= 0.0) || rv > 1.0)
                throw validation_error("mean reward outside [0, 1] at state " +
                                       std::to_string(s) + ", action " + std::to_string(a));
        }
    }
}

double q_value(const FiniteMDP& mdp, const ValueFunction& v, int s, int a) {
    double acc = mdp.r(s, a);
    double future = 0.0;
    for (int s2 = 0; s2 < mdp.n_states; ++s2) future += mdp.p(s, a, s2) * v.value_of[s2];
    return acc + mdp.discount * future;
}

SolveResult value_iteration(const FiniteMDP& mdp, double tol) {
    mdp.validate();
    if (!(tol > 0.0)) throw validation_error("tolerance must be positive");

    // Standard contraction argument: once successive sweeps differ by at most
    // tol*(1-g)/(2g) in sup norm, the iterate is within tol of the fixed point.
    const double g = mdp.discount;
    const double threshold =
        g > 0.0 ? tol * (1.0 - g) / (2.0 * g) : std::numeric_limits<double>::infinity();

    SolveResult out;
    out.value.value_of.assign(mdp.n_states, 0.0);
    std::vector<double> next(mdp.n_states, 0.0);
    for (;;) {
        ++out.sweeps;
        double change = 0.0;
        for (int s = 0; s < mdp.n_states; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < mdp.n_actions; ++a)
                best = std::max(best, q_value(mdp, out.value, s, a));
            change = std::max(change, std::abs(best - out.value.value_of[s]));
            next[s] = best;
        }
        out.value.value_of.swap(next);
        if (change <= threshold) break;
    }

    out.policy.action_of.assign(mdp.n_states, 0);
    for (int s = 0; s < mdp.n_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double q = q_value(mdp, out.value, s, a);
            if (q > best) {
                best = q;
                out.policy.action_of[s] = a;
            }
        }
    }
    return out;
}

ValueFunction policy_evaluation(const FiniteMDP& mdp, const Policy& pi) {
    mdp.validate();
    if (static_cast<int>(pi.action_of.size()) != mdp.n_states)
        throw validation_error("policy size does not match state count");
    for (int a : pi.action_of)
        if (a < 0 || a >= mdp.n_actions) throw validation_error("policy action out of range");

    const int n = mdp.n_states;
    Eigen::MatrixXd system(n, n);
    Eigen::VectorXd reward(n);
    for (int s = 0; s < n; ++s) {
        const int a = pi.action_of[s];
        reward(s) = mdp.r(s, a);
        for (int s2 = 0; s2 < n; ++s2)
            system(s, s2) = (s == s2 ? 1.0 : 0.0) - mdp.discount * mdp.p(s, a, s2);
    }
    const Eigen::VectorXd v = system.partialPivLu().solve(reward);

    ValueFunction out;
    out.value_of.assign(v.data(), v.data() + n);
    return out;
}

double perturbation_gap(double epsilon, double gamma) {
    if (!(epsilon >= 0.0)) throw validation_error("perturbation size must be nonnegative");
    if (!(gamma >= 0.0) || gamma >= 1.0)
        throw validation_error("discount must lie in [0, 1)");
    const double slack = 1.0 - gamma;
    return epsilon / (slack * slack);
}

}  // namespace bts
