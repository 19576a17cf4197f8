#pragma once

#include <cstdint>
#include <random>

namespace sigmak {

/// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
/// is fixed by the standard) and maps raw words to doubles directly, so the
/// stream of samples for a given seed is identical on every platform and
/// standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    [[nodiscard]] std::uint64_t raw() { return eng_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    [[nodiscard]] double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    [[nodiscard]] double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    /// Uniform integer in [lo, hi] (inclusive); hi >= lo required.
    [[nodiscard]] int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(eng_() % span);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace sigmak
