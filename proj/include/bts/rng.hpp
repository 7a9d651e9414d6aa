#pragma once

#include <cstdint>
#include <vector>

namespace bts {

/**
 * Counter-based splittable random stream.
 *
 * Output i of a stream with key K is mix(K + i * GOLDEN), the SplitMix64
 * construction, so a stream is a pure function of (key, counter). Substreams
 * derive a fresh key by hashing the parent key with an index, which makes
 * every draw reproducible from (master seed, node id, draw index) regardless
 * of the order in which other nodes are sampled.
 */
class RngStream {
public:
    RngStream() : key_(0) {}
    explicit RngStream(std::uint64_t key) : key_(key) {}

    /// Stream for (master, a, b), e.g. (seed, node id, draw index).
    static RngStream keyed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

    /// Child stream for index `idx`; independent of this stream's counter.
    RngStream substream(std::uint64_t idx) const;

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64();

    /// Uniform on [0, 1), 53-bit resolution.
    double next_double();

    /// Uniform on (0, 1]; safe as a log() argument.
    double next_double_pos();

    /// Standard normal (Box-Muller, no cached spare).
    double next_normal();

    /// Gamma(shape, 1), shape > 0. Marsaglia-Tsang squeeze.
    double next_gamma(double shape);

    /// Beta(a, b), a, b > 0. Degenerates to Bernoulli(a/(a+b)) on the atoms
    /// {0,1} when both gamma draws underflow, which is the correct weak limit
    /// for vanishing parameters.
    double next_beta(double a, double b);

    /// Dirichlet(alpha) written into `out` (same length as alpha). For
    /// near-zero totals this collapses to a vertex chosen with probability
    /// alpha_i / sum(alpha), again the correct weak limit.
    void next_dirichlet(const std::vector<double>& alpha, std::vector<double>& out);

    /// Index sampled from an (unnormalized is fine) nonnegative weight vector.
    int next_categorical(const std::vector<double>& weights);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace bts
