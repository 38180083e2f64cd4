#pragma once

#include <cstdint>

namespace normbench {

// Deterministic splitmix64 generator.  std::uniform_int_distribution is not
// portable across standard libraries, so all randomized tests and CLI demos
// draw through this.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // rejection sampling to avoid modulo bias; n is tiny in practice
        const std::uint64_t limit = ~0ULL - (~0ULL % n);
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % n;
    }

    std::int64_t range(std::int64_t lo, std::int64_t hi) { // inclusive
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::uint64_t state_;
};

} // namespace normbench
