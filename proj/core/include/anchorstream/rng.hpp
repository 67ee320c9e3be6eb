#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "anchorstream/errors.hpp"

namespace anchorstream {

// Deterministic, seedable random stream. (master_seed, stream_id) fully
// determines the output sequence on every platform; distinct stream_ids
// give statistically independent substreams, so replications keyed by
// index parallelize without sequence coupling.
//
// Core generator is xoshiro256++ seeded through splitmix64. All
// distributions are implemented here rather than through <random>, whose
// distribution outputs are not portable across standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();
    // Unbiased integer in [0, bound); bound must be positive.
    std::uint64_t next_below(std::uint64_t bound);

    double uniform();       // [0, 1), 53-bit
    double uniform_open();  // (0, 1), never returns an endpoint

    bool bernoulli(double p);
    double normal();
    // Gamma(shape, 1) for any shape > 0, including shape < 1.
    double gamma(double shape);
    double beta(double a, double b);

    // Dirichlet draw by normalizing independent Gamma(alpha_k, 1) variates;
    // every component is strictly positive and the components sum to 1.
    void dirichlet(std::span<const double> alphas, std::span<double> out);
    std::vector<double> dirichlet(std::span<const double> alphas);

    // Simple random sample without replacement: k distinct indices in
    // [0, n), every k-subset equally probable. Partial Fisher-Yates.
    std::vector<std::int64_t> srswor(std::int64_t n, std::int64_t k);

private:
    std::array<std::uint64_t, 4> state_{};
    std::uint64_t master_seed_ = 0;
    std::uint64_t stream_id_ = 0;
};

// Stable 64-bit substream seed derived from (master_seed, stream_id); used
// where an API takes a single seed but several independent streams are
// wanted from one master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id);

}  // namespace anchorstream
