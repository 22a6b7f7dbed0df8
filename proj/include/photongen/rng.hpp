#ifndef PHOTONGEN_RNG_HPP
#define PHOTONGEN_RNG_HPP

#include <cstdint>
#include <cmath>
#include <span>
#include <vector>

#include "photongen/errors.hpp"

namespace photongen {

/// SplitMix64 step: advances `state` and returns a well-mixed 64-bit value.
inline std::uint64_t splitmix64_next(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) { return splitmix64_next(x); }

/// xoshiro256++ with explicit substream derivation. Simulation stages and
/// modulation periods each get an independent generator keyed by
/// (seed, stream id, index), which makes chunked and multi-threaded
/// processing bit-reproducible: the draw sequence of one substream never
/// depends on how work was scheduled elsewhere.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto &word : s_)
            word = splitmix64_next(sm);
    }

    static Xoshiro256pp stream(std::uint64_t seed, std::uint64_t stream_id,
                               std::uint64_t index = 0) {
        std::uint64_t h = mix64(seed ^ 0x6A09E667F3BCC909ull);
        h = mix64(h ^ stream_id);
        h = mix64(h ^ index);
        return Xoshiro256pp(h);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on the open interval (0, 1); never returns 0 or 1, so it is
    /// safe under log().
    double uniform() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double mean) { return -mean * std::log(uniform()); }

    bool bernoulli(double p) { return uniform() < p; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

/// Walker/Vose alias table: O(1) sampling from a fixed discrete distribution.
/// One uniform per draw — the integer part picks the column, the fractional
/// part decides between the column and its alias, which is exact.
class AliasTable {
  public:
    explicit AliasTable(std::span<const double> probs) {
        const std::size_t n = probs.size();
        if (n == 0)
            throw DomainError("AliasTable: empty distribution");
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0))
                throw DomainError("AliasTable: negative probability");
            sum += p;
        }
        if (!(sum > 0.0))
            throw DomainError("AliasTable: all probabilities are zero");

        prob_.resize(n);
        alias_.resize(n);
        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i)
            scaled[i] = probs[i] * static_cast<double>(n) / sum;

        std::vector<std::uint32_t> small, large;
        for (std::size_t i = 0; i < n; ++i)
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));

        while (!small.empty() && !large.empty()) {
            const std::uint32_t s = small.back();
            const std::uint32_t l = large.back();
            small.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (std::uint32_t i : large)
            prob_[i] = 1.0;
        for (std::uint32_t i : small)
            prob_[i] = 1.0; // only rounding residue lands here
    }

    std::uint32_t sample(Xoshiro256pp &rng) const {
        const double scaled = rng.uniform() * static_cast<double>(prob_.size());
        auto i = static_cast<std::size_t>(scaled);
        if (i >= prob_.size())
            i = prob_.size() - 1;
        const double frac = scaled - static_cast<double>(i);
        return frac < prob_[i] ? static_cast<std::uint32_t>(i) : alias_[i];
    }

  private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

} // namespace photongen

#endif
