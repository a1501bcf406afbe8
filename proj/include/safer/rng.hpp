#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace safer {

/// Seeded generator with platform-stable output (mt19937_64 bit stream plus
/// fixed bit-to-double mapping; no implementation-defined distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t bits() { return gen_(); }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

    /// Flat Dirichlet sample via normalized exponentials.
    std::vector<double> dirichlet(std::size_t n) {
        std::vector<double> w(n);
        double sum = 0.0;
        for (auto& v : w) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            v = -std::log(u);
            sum += v;
        }
        for (auto& v : w) v /= sum;
        return w;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace safer
