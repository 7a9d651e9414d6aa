#pragma once

#include <utility>
#include <vector>

#include "bts/hyper.hpp"

namespace bts {

/// Monte Carlo draws of one value bound at one node. Raw draws are kept so a
/// later pass can pool samples across nodes instead of averaging averages.
struct BoundEstimate {
    std::vector<double> samples;
    double sum = 0.0;

    int count() const { return static_cast<int>(samples.size()); }
    bool empty() const { return samples.empty(); }
    void add(double v);

    /// state_error when no sample has been added yet.
    double mean() const;
};

/// Optimal policy of the belief's mean MDP; the policy lower bounds are
/// evaluated with. Callers compute it once per node and reuse it per draw.
Policy mean_policy(const HyperState& hyper);

/// One upper-bound draw: optimal value of a posterior MDP sample at the state.
double sample_upper(const HyperState& hyper, RngStream& stream);

/// One lower-bound draw: value of `pinned` on a posterior MDP sample.
double sample_lower(const HyperState& hyper, const Policy& pinned, RngStream& stream);

/**
 * m coupled draws of both bounds. Draw j solves one MDP sampled from
 * node_stream.substream(j) for both the upper and the lower estimate, so the
 * two estimates share randomness and results do not depend on the order in
 * which nodes are visited.
 */
std::pair<BoundEstimate, BoundEstimate> estimate_bounds(const HyperState& hyper, int m,
                                                        const RngStream& node_stream);

/**
 * Closed-form (lower, upper) value bracket at `state` for a finite mixture:
 * the upper averages each candidate's optimal value, the lower averages the
 * candidates' values of the single policy that is optimal for the
 * weight-averaged MDP.
 */
std::pair<double, double> exact_bounds(int state, const std::vector<WeightedMdp>& finite_support);

/// Bracket for a hyper-state; capability_error unless the belief has finite
/// support.
std::pair<double, double> exact_bounds(const HyperState& hyper);

}  // namespace bts
