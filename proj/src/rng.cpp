#include "bts/rng.hpp"

#include <cmath>

#include "bts/errors.hpp"

namespace bts {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

RngStream RngStream::keyed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t k = mix(master + kGolden);
    k = mix(k ^ mix(a + kGolden));
    k = mix(k ^ mix(b + 2 * kGolden));
    return RngStream(k);
}

RngStream RngStream::substream(std::uint64_t idx) const {
    return RngStream(mix(key_ ^ mix(idx + kGolden)));
}

std::uint64_t RngStream::next_u64() {
    return mix(key_ + (++counter_) * kGolden);
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_double_pos() {
    return 1.0 - next_double();
}

double RngStream::next_normal() {
    const double u1 = next_double_pos();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double RngStream::next_gamma(double shape) {
    if (!(shape > 0.0)) throw validation_error("gamma shape must be positive");
    if (shape < 1.0) {
        // Boost to shape+1 and scale back by a uniform power.
        const double g = next_gamma(shape + 1.0);
        const double u = next_double_pos();
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = next_normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = next_double_pos();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RngStream::next_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw validation_error("beta parameters must be positive");
    const double x = next_gamma(a);
    const double y = next_gamma(b);
    const double s = x + y;
    if (s <= 0.0) {
        // Both gamma draws underflowed; Beta(a,b) -> Bernoulli(a/(a+b)) as a,b -> 0.
        return next_double() < a / (a + b) ? 1.0 : 0.0;
    }
    return x / s;
}

void RngStream::next_dirichlet(const std::vector<double>& alpha, std::vector<double>& out) {
    out.resize(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (!(alpha[i] > 0.0)) throw validation_error("dirichlet parameters must be positive");
        out[i] = next_gamma(alpha[i]);
        total += out[i];
    }
    if (total <= 0.0) {
        // All draws underflowed; collapse to a vertex with the mean weights.
        std::vector<double> mean(alpha);
        const int v = next_categorical(mean);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (static_cast<int>(i) == v) ? 1.0 : 0.0;
        return;
    }
    for (double& x : out) x /= total;
}

int RngStream::next_categorical(const std::vector<double>& weights) {
    if (weights.empty()) throw validation_error("categorical needs at least one weight");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw validation_error("categorical weights must be nonnegative");
        total += w;
    }
    if (total <= 0.0) throw validation_error("categorical weights sum to zero");
    double u = next_double() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace bts
