#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace ontic {

// Deterministic, splittable random streams. Every stochastic routine takes an
// Rng derived from one master seed so that report files replay byte-identically
// for a fixed config+seed. The generator and the normal/categorical draws are
// spelled out here (rather than proxied through std::*_distribution) because
// distribution sequences are implementation-defined.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Child seed for a named subtask; deterministic in (master, tag, index).
inline std::uint64_t split_seed(std::uint64_t master, std::string_view tag,
                                std::uint64_t index = 0) {
    return splitmix64(master ^ splitmix64(hash_tag(tag) + 0x632be59bd9b4e019ull * index));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x2545f4914f6cdd1dull)) {}

    std::uint64_t next_u64() {
        state_ = splitmix64(state_ + 0x9e3779b97f4a7c15ull);
        return state_;
    }

    /// Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (cached spare).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Index draw from non-negative weights (need not be normalized).
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("categorical: negative weight");
            total += w;
        }
        if (total <= 0.0) throw std::invalid_argument("categorical: zero total weight");
        double x = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return i;
        }
        return weights.size() - 1;
    }

    Rng split(std::string_view tag, std::uint64_t index = 0) const {
        return Rng(split_seed(state_, tag, index));
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ontic
