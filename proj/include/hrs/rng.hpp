#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hrs {

//! Seeded generator with hand-rolled distributions so streams are identical
//! across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal(double mean = 0.0, double stddev = 1.0) {
        // Box-Muller, one draw per call; the second root is discarded to keep
        // the stream position independent of call history.
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586 * u2);
    }

    double exponential(double scale) {
        double u = uniform();
        while (u >= 1.0) u = uniform();
        return -scale * std::log1p(-u);
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::size_t index(std::size_t n) {  // uniform in [0, n)
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace hrs
