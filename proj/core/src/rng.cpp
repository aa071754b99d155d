#include "vfem/rng.hpp"

#include <cmath>
#include <numbers>

namespace vfem {

Rng::Rng(std::uint64_t master_seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::vector<Point> uniform_disk(Rng& rng, int count, double radius) {
    return uniform_annulus(rng, count, 0.0, radius);
}

std::vector<Point> uniform_annulus(Rng& rng, int count, double inner, double outer) {
    std::vector<Point> out;
    out.reserve(count);
    const double a = inner * inner;
    const double b = outer * outer;
    for (int i = 0; i < count; ++i) {
        const double r = std::sqrt(a + (b - a) * rng.uniform());
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        out.push_back(Point::polar(r, theta));
    }
    return out;
}

}  // namespace vfem
