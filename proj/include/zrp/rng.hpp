#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace zrp {

// Splittable deterministic RNG. splitmix64 seeds an xoshiro256** state, so
// replica streams derived from (seed, stream_id) are independent and the
// byte stream is identical across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& si : s_) si = splitmix64(x);
    }

    Rng split(std::uint64_t stream) const {
        Rng r(*this);
        std::uint64_t x = s_[0] ^ (0xbf58476d1ce4e5b9ULL * (stream + 1));
        for (auto& si : r.s_) si = splitmix64(x);
        return r;
    }

    std::uint64_t next_u64() {
        std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    // index in [0,n)
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // draw from normalized probabilities by CDF walk
    std::size_t discrete(std::span<const double> p) {
        double u = uniform();
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            u -= p[i];
            if (u <= 0.0) return i;
        }
        return p.size() - 1;
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace zrp
