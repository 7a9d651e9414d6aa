#include "bts/concentration.hpp"

#include <cmath>

#include "bts/errors.hpp"
#include "bts/search.hpp"

namespace bts {

namespace {

void check_range(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw validation_error("sample range must be positive");
}

void check_eps(double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw validation_error("deviation must be nonnegative");
}

void check_scale(double beta, double delta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw validation_error("beta must be positive");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw validation_error("delta must be positive");
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) throw validation_error("discount must be in (0, 1)");
}

}  // namespace

double hoeffding_tail(int n, double h, double eps) {
    if (n < 1) throw validation_error("sample count must be positive");
    check_range(h);
    check_eps(eps);
    return std::exp(-2.0 * n * eps * eps / (h * h));
}

double weighted_hoeffding_tail(const std::vector<double>& weights, double h, double eps) {
    if (weights.empty()) throw validation_error("weights must not be empty");
    check_range(h);
    check_eps(eps);
    double total = 0.0;
    double sum_sq = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw validation_error("weights must be nonnegative");
        total += w;
        sum_sq += w * w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw validation_error("weights must sum to 1");
    return std::exp(-2.0 * eps * eps / (h * h * sum_sq));
}

double expected_leaf_samples(double beta, double delta) {
    check_scale(beta, delta);
    return 1.0 + (beta * beta) / (delta * delta);
}

double leaf_sample_tail(double beta, double delta, int n) {
    check_scale(beta, delta);
    if (n < 0) throw validation_error("sample count must be nonnegative");
    double x = n * delta / beta;
    return std::exp(-2.0 * x * x);
}

int depth_floor(double beta, double delta, double gamma) {
    check_scale(beta, delta);
    check_gamma(gamma);
    return depth_for_accuracy(gamma, delta / beta);
}

double sbb1_depth_tail(double beta, double delta, double gamma, int k) {
    int k0 = depth_floor(beta, delta, gamma);
    if (k <= k0) return 1.0;
    double x = delta / beta;
    return std::exp(-2.0 * (k - k0) * x * x);
}

double sbb2_depth_tail(double beta, double delta, double gamma, int k) {
    int k0 = depth_floor(beta, delta, gamma);
    if (k <= k0) return 1.0;
    double excess = k - k0;
    double horizon_mass = (1.0 - std::pow(gamma, k + 1)) / (1.0 - gamma);
    double slack = 1.0 - horizon_mass / excess;
    if (slack <= 0.0) return 1.0;  // transient regime: pooled bias still above delta
    double rate = (1.0 - gamma * gamma) / (1.0 - std::pow(gamma, 2 * (k + 1)));
    return std::exp(-2.0 * excess * excess * rate * slack * slack);
}

std::pair<double, double> tail_error(double gamma, int k) {
    check_gamma(gamma);
    if (k < 1) throw validation_error("depth must be at least 1");
    double naive = std::pow(gamma, k) / (1.0 - gamma);
    double smooth = 0.0;
    double power = std::pow(gamma, k);
    for (int n = k; power / (1.0 - gamma) >= 1e-12; ++n, power *= gamma)
        smooth += power * static_cast<double>(n - k) / static_cast<double>(n);
    return {naive, smooth};
}

std::pair<double, double> undiscounted_tail_error(double horizon, double k) {
    if (!(k >= 1.0) || !(horizon >= k)) throw validation_error("need 1 <= k <= horizon");
    double naive = horizon - k;
    double smooth = horizon - k * (1.0 + std::log(horizon / k));
    return {naive, smooth};
}

TailCurve sbb1_tail_curve(double beta, double delta, double gamma, int k_max) {
    if (k_max < 0) throw validation_error("depth must be nonnegative");
    TailCurve curve;
    curve.k0 = depth_floor(beta, delta, gamma);
    curve.tail.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) curve.tail.push_back(sbb1_depth_tail(beta, delta, gamma, k));
    return curve;
}

TailCurve sbb2_tail_curve(double beta, double delta, double gamma, int k_max) {
    if (k_max < 0) throw validation_error("depth must be nonnegative");
    TailCurve curve;
    curve.k0 = depth_floor(beta, delta, gamma);
    curve.tail.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) curve.tail.push_back(sbb2_depth_tail(beta, delta, gamma, k));
    return curve;
}

}  // namespace bts
