#pragma once

// Stage one of the deployment: nodes push and pull on their geometric
// neighbours until every surplus force is absorbed by friction.
//
// Forces act only between adjacent nodes, where i and j are adjacent when no
// third node k is closer to both of them (max(d_ik, d_jk) < d_ij); this is the
// relative neighbourhood graph. The base station at the origin exerts forces
// like any node but never receives them.

#include <span>
#include <vector>

#include "vfem/core.hpp"

namespace vfem {

struct ForceVector {
    double fx = 0.0;
    double fy = 0.0;

    double magnitude() const { return std::sqrt(fx * fx + fy * fy); }
    ForceVector& operator+=(ForceVector o) {
        fx += o.fx;
        fy += o.fy;
        return *this;
    }
};

struct RelaxationReport {
    int iterations_used = 0;
    double final_max_displacement = 0.0;
    bool converged = false;
    std::vector<double> max_displacement_trace;
};

struct RelaxationResult {
    std::vector<Point> positions;
    RelaxationReport report;
};

/// Signed pairwise force magnitude at distance d: negative is repulsion,
/// positive is gravitation, zero inside either dead zone. Throws
/// std::domain_error for d <= 0.
double pairwise_force_magnitude(double d, double lattice, const ForceParams& params);

/// Boundary repulsion on a node at `position`, directed at the origin. Zero
/// when the node is deeper than delta_l inside the disk.
ForceVector boundary_force(Point position, double radius, const ForceParams& params);

/// Net virtual force on sensor `index` of `positions` (base implicit at the
/// origin). Friction is not included; relax() applies it as a motion gate.
ForceVector resultant_force(std::size_t index, std::span<const Point> positions, double radius,
                            double lattice, const ForceParams& params);

/// All net forces for one frozen snapshot.
std::vector<ForceVector> resultant_forces(std::span<const Point> positions, double radius,
                                          double lattice, const ForceParams& params);

/// Synchronous relaxation. Each step moves every node whose net force exceeds
/// friction by step_scale * (|F| - f) along F, capped at l/2, then projects it
/// back into the disk. Stops once the largest move is below convergence_eps.
RelaxationResult relax(std::span<const Point> positions, const NetworkConfig& config);

}  // namespace vfem
