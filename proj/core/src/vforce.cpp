#include "vfem/vforce.hpp"

#include <algorithm>
#include <cstdint>
#include <numbers>

namespace vfem {
namespace {

constexpr double kCoincidentJitter = 1e-6;

// Direction used when two points coincide, derived from the pair's ids so it
// is reproducible. Points from node `lo` to node `hi`.
Point jitter_direction(std::size_t lo, std::size_t hi) {
    std::uint64_t h = (static_cast<std::uint64_t>(lo) << 32) ^ hi;
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(h >> 11) * 0x1.0p-53;
    return Point::polar(1.0, theta);
}

// Radial projection onto the disk; shrinks by an ulp at a time if rounding
// leaves the point a hair outside.
Point project_into_disk(Point p, double r, double radius) {
    p = p * (radius / r);
    while (p.norm() > radius) p = p * std::nextafter(1.0, 0.0);
    return p;
}

// Snapshot of all points with the base at slot 0 and sensor i at slot i + 1.
class ForceField {
public:
    ForceField(std::span<const Point> sensors, double radius, double lattice,
               const ForceParams& params)
        : radius_(radius), lattice_(lattice), params_(params), n_(sensors.size() + 1) {
        pts_.reserve(n_);
        pts_.push_back(Point{});
        pts_.insert(pts_.end(), sensors.begin(), sensors.end());
        range_ = 2.0 * std::numbers::sqrt3 * lattice - params.d0;

        dist_.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double d = distance(pts_[i], pts_[j]);
                dist_[i * n_ + j] = d;
                dist_[j * n_ + i] = d;
            }
        }
        near_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                if (j != i && d(i, j) < range_) near_[i].push_back(j);
            }
        }
    }

    ForceVector on_sensor(std::size_t slot) const {
        ForceVector total;
        for (std::size_t j : near_[slot]) {
            if (!adjacent(slot, j)) continue;
            total += pair(slot, j);
        }
        total += boundary_force(pts_[slot], radius_, params_);
        return total;
    }

private:
    double d(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }

    bool adjacent(std::size_t i, std::size_t j) const {
        const double dij = d(i, j);
        for (std::size_t k : near_[i]) {
            if (k == j) continue;
            if (std::max(d(i, k), d(j, k)) < dij) return false;
        }
        return true;
    }

    // Force node j exerts on node i.
    ForceVector pair(std::size_t i, std::size_t j) const {
        double dij = d(i, j);
        Point towards_j;
        if (dij == 0.0) {
            const Point u = jitter_direction(std::min(i, j), std::max(i, j));
            towards_j = i < j ? u : u * -1.0;
            dij = kCoincidentJitter;
        } else {
            towards_j = (pts_[j] - pts_[i]) * (1.0 / dij);
        }
        const double s = pairwise_force_magnitude(dij, lattice_, params_);
        return {s * towards_j.x, s * towards_j.y};
    }

    double radius_;
    double lattice_;
    const ForceParams& params_;
    std::size_t n_;
    double range_ = 0.0;
    std::vector<Point> pts_;
    std::vector<double> dist_;
    std::vector<std::vector<std::size_t>> near_;
};

}  // namespace

double pairwise_force_magnitude(double d, double lattice, const ForceParams& p) {
    if (!(d > 0.0)) throw std::domain_error("pairwise_force_magnitude: distance must be > 0");
    const double target = std::numbers::sqrt3 * lattice;
    if (d < target - p.d0) return -p.eta / std::pow(d, p.beta);
    if (d <= target) return 0.0;
    if (d < 2.0 * target - p.d0) return p.lambda * std::pow(d, p.beta);
    return 0.0;
}

ForceVector boundary_force(Point position, double radius, const ForceParams& p) {
    const double r = position.norm();
    const double gap = radius - r;
    if (gap > p.delta_l || r == 0.0) return {};
    const double magnitude = p.eta / std::pow(std::max(gap, p.convergence_eps), p.tau);
    return {-magnitude * position.x / r, -magnitude * position.y / r};
}

ForceVector resultant_force(std::size_t index, std::span<const Point> positions, double radius,
                            double lattice, const ForceParams& params) {
    if (index >= positions.size()) throw std::out_of_range("resultant_force: index");
    return ForceField(positions, radius, lattice, params).on_sensor(index + 1);
}

std::vector<ForceVector> resultant_forces(std::span<const Point> positions, double radius,
                                          double lattice, const ForceParams& params) {
    const ForceField field(positions, radius, lattice, params);
    std::vector<ForceVector> out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) out[i] = field.on_sensor(i + 1);
    return out;
}

RelaxationResult relax(std::span<const Point> positions, const NetworkConfig& config) {
    const ForceParams& p = config.force;
    const double l = config.lattice();
    const double cap = l / 2.0;
    const double radius = config.radius;

    RelaxationResult result;
    result.positions.assign(positions.begin(), positions.end());
    auto& report = result.report;

    for (int iter = 1; iter <= p.max_iters; ++iter) {
        const auto forces = resultant_forces(result.positions, radius, l, p);
        double max_move = 0.0;
        for (std::size_t i = 0; i < forces.size(); ++i) {
            const double mag = forces[i].magnitude();
            if (!(mag > p.friction)) continue;
            const double step = std::min(p.step_scale * (mag - p.friction), cap);
            const Point before = result.positions[i];
            Point after = before + Point{forces[i].fx, forces[i].fy} * (step / mag);
            const double r = after.norm();
            if (r > radius) after = project_into_disk(after, r, radius);
            result.positions[i] = after;
            max_move = std::max(max_move, distance(before, after));
        }
        report.iterations_used = iter;
        report.final_max_displacement = max_move;
        report.max_displacement_trace.push_back(max_move);
        if (max_move < p.convergence_eps) {
            report.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace vfem
