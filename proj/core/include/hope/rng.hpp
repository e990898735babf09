#pragma once

#include <cstdint>
#include <span>

namespace hope {

/// Deterministic 64-bit LCG. Same seed, same draw sequence, on every
/// platform -- this is what makes sampling and option shuffling
/// reproducible across runs and languages.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {}

    /// Advances the state and returns it.
    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
        return state_;
    }

    /// Uniform draw in [0, range). range must be >= 1.
    std::uint64_t draw(std::uint64_t range) { return (next() >> 33) % range; }

    /// Fisher-Yates shuffle over an index span.
    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(draw(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

} // namespace hope
