#pragma once

// Seed splitting. One master seed expands to independent per-stage streams:
// stream(seed, stage) = mt19937_64(seed_seq{lo32(seed), hi32(seed), stage}).
// Doubles are drawn from the top 53 bits so draws are identical on every
// standard library.

#include <cstdint>
#include <random>
#include <vector>

#include "vfem/core.hpp"

namespace vfem {

enum class Stream : std::uint32_t {
    Deployment = 1,
    UniformBaseline = 3,
    WuBaseline = 4,
};

class Rng {
public:
    Rng(std::uint64_t master_seed, Stream stream);

    /// Uniform on [0, 1).
    double uniform();
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// `count` points uniform by area in the disk of radius `radius`.
std::vector<Point> uniform_disk(Rng& rng, int count, double radius);

/// `count` points uniform by area in the annulus inner <= r < outer.
std::vector<Point> uniform_annulus(Rng& rng, int count, double inner, double outer);

}  // namespace vfem
