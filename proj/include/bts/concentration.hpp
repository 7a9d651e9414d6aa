#pragma once

#include <utility>
#include <vector>

namespace bts {

/// Pr(mean of n independent range-h samples exceeds its expectation by eps):
/// exp(-2 n eps^2 / h^2).
double hoeffding_tail(int n, double h, double eps);

/// Same deviation probability for a convex combination with the given
/// weights: exp(-2 eps^2 / (h^2 sum w_i^2)). Weights must be nonnegative and
/// sum to 1.
double weighted_hoeffding_tail(const std::vector<double>& weights, double h, double eps);

/// Mean number of samples a leaf needs before its running mean clears a
/// delta slack below the true value: 1 + beta^2 / delta^2.
double expected_leaf_samples(double beta, double delta);

/// Pr(that stopping time exceeds n): exp(-2 n^2 delta^2 / beta^2).
double leaf_sample_tail(double beta, double delta, int n);

/// First depth where the value uncertainty beta * gamma^k drops below delta.
int depth_floor(double beta, double delta, double gamma);

/// Pr(a suboptimal branch is expanded past depth k) when each level is
/// cleared on the strength of fresh leaf samples alone. 1 for k <= the floor.
double sbb1_depth_tail(double beta, double delta, double gamma, int k);

/// Same probability when levels pool samples over the half-depth window.
/// Returns 1 in the transient regime where the pooled bias still exceeds
/// delta; past it the decay is quadratic in the depth excess and free of
/// delta.
double sbb2_depth_tail(double beta, double delta, double gamma, int k);

/// (naive, smoothed) value mass a depth-k truncation can miss:
/// gamma^k / (1 - gamma) and sum_{n >= k} gamma^n (n - k) / n. k >= 1.
std::pair<double, double> tail_error(double gamma, int k);

/// Undiscounted variant over a horizon: (T - k, T - k (1 + ln(T / k))),
/// 1 <= k <= T.
std::pair<double, double> undiscounted_tail_error(double horizon, double k);

/// Depth tail curve tabulated for k = 0..k_max.
struct TailCurve {
    int k0 = 0;
    std::vector<double> tail;
};

TailCurve sbb1_tail_curve(double beta, double delta, double gamma, int k_max);
TailCurve sbb2_tail_curve(double beta, double delta, double gamma, int k_max);

}  // namespace bts
