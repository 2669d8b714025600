#pragma once

#include <cstdint>

#include "ftag/instance.hpp"

namespace ftag {

// Deterministic uniform helpers; hand-rolled mappings so seeded suites
// reproduce across toolchains. Seeding with the raw value keeps the
// splitmix increments of different seeds misaligned, so nearby seeds give
// unrelated streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool chance(double p) { return u01() < p; }

private:
    std::uint64_t state_;
};

struct RandomInstanceParams {
    int max_vertices = 6;
    int min_frozen = 1;
    int max_frozen = 5;
    int max_starters = 2;
    double max_release = 3.0;
    bool edge_interior_homes = true;
};

// A random connected weighted graph (spanning tree plus extra edges,
// parallels allowed) with random robots; at least one frozen robot is
// released at 1 or later so the offline optimum is bounded away from zero.
Instance random_instance(std::uint64_t seed, const RandomInstanceParams& params = {});

}  // namespace ftag
