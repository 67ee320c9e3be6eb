#include "anchorstream/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace anchorstream {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {
    std::uint64_t a = master_seed;
    std::uint64_t b = stream_id ^ 0xD2B74407B1CE6E93ULL;
    std::uint64_t s = splitmix64(a) ^ rotl(splitmix64(b), 32);
    for (auto& word : state_) word = splitmix64(s);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound == 0) throw ValidationError("next_below bound must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
        r = next_u64();
    } while (r >= limit);
    return r % bound;
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

bool RngStream::bernoulli(double p) {
    if (p < 0.0 || p > 1.0) throw ValidationError("bernoulli p must lie in [0,1]");
    return uniform() < p;
}

double RngStream::normal() {
    // Box-Muller; two uniforms per variate, no cached state.
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0)) throw ValidationError("gamma shape must be positive");
    if (shape < 1.0) {
        // boost: G(a) = G(a+1) * U^(1/a); dominant path for Jeffreys alpha=1/2
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform_open(), 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RngStream::beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
}

void RngStream::dirichlet(std::span<const double> alphas, std::span<double> out) {
    if (alphas.size() != out.size()) throw ValidationError("dirichlet output size mismatch");
    if (alphas.empty()) throw ValidationError("dirichlet needs at least one component");
    double total = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        out[i] = gamma(alphas[i]);
        total += out[i];
    }
    for (double& v : out) v /= total;
}

std::vector<double> RngStream::dirichlet(std::span<const double> alphas) {
    std::vector<double> out(alphas.size());
    dirichlet(alphas, out);
    return out;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t a = master_seed;
    std::uint64_t b = stream_id ^ 0xA5A5F0F0C3C33C3CULL;
    return splitmix64(a) ^ rotl(splitmix64(b), 17);
}

std::vector<std::int64_t> RngStream::srswor(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) throw ValidationError("srswor requires 0 <= k <= n");
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), std::int64_t{0});
    for (std::int64_t i = 0; i < k; ++i) {
        const std::int64_t j = i + static_cast<std::int64_t>(
                                       next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

}  // namespace anchorstream
