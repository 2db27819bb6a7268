#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace daelab {

// Independent stream identifiers so that, e.g., changing the number of
// batches does not perturb weight initialization.
enum class RngStream : std::uint64_t {
    init = 1,
    shuffle = 2,
    noise = 3,
    pca = 4,
    metrics = 5,
    data = 6,
};

/// Seeded generator built on std::mt19937_64, whose output sequence is fixed
/// by the C++ standard. Distributions are implemented here rather than with
/// <random> distributions, which are implementation-defined, so draws are
/// bit-identical across standard libraries.
///
/// Per-stream seeds are derived with SplitMix64(seed ^ SplitMix64(stream)).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);
    Rng(std::uint64_t seed, RngStream stream) : Rng(seed, static_cast<std::uint64_t>(stream)) {}

    // Child generator for a purpose-specific stream; does not advance *this.
    Rng fork(RngStream stream) const { return Rng(seed_, stream); }
    Rng fork(std::uint64_t stream) const { return Rng(seed_, stream); }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    // Standard normal via the Box-Muller transform; caches the second variate.
    double normal();

    std::vector<std::size_t> permutation(std::size_t n);

    template <class T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    static std::uint64_t splitmix64(std::uint64_t x);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace daelab
