#pragma once

// Stage two: split the disk into k equal-width annuli, size the sensing and
// relay populations of each so every annulus drains at the same relative rate,
// and project the relaxed nodes onto evenly spaced slots on each mid-curve.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfem/core.hpp"

namespace vfem {

class PlanningError : public std::runtime_error {
public:
    PlanningError(const std::string& what, int minimum_nodes)
        : std::runtime_error(what), minimum_nodes_(minimum_nodes) {}
    int minimum_nodes() const noexcept { return minimum_nodes_; }

private:
    int minimum_nodes_;
};

struct AnnulusRow {
    int index = 0;
    int sensing_count = 0;
    int relay_count = 0;
    double expected_hop = 0.0;     // m
    double influence_width = 0.0;  // m
    double radius = 0.0;           // mid-curve radius (m + 0.5) d_w
    std::vector<double> sensing_angles;
    std::vector<double> relay_angles;

    int total() const { return sensing_count + relay_count; }
};

struct AnnulusPlan {
    int k = 0;
    double radius = 0.0;  // network radius R
    double width = 0.0;   // d_w = R / k
    int node_count = 0;
    double slot_phase = 0.0;
    std::vector<AnnulusRow> annuli;
    /// Innermost relay count as the closed-form formula gives it, before the
    /// leftover budget overrides it.
    int inner_relay_formula = 0;
    std::vector<std::string> warnings;

    int sensing_total() const;
    int total() const;
};

struct PlanOptions {
    double slot_phase = 0.0;
    int quadrature_panels = 256;
};

/// 1 for the innermost disk, otherwise the fewest evenly spaced sensors whose
/// 1.5 d_w sensing discs cover annulus m.
int sensing_count(int m);

/// Half-angle at the base between a node on mid-curve m and the two points of
/// mid-curve m-1 at distance 1.5 d_w from it. Independent of d_w.
double max_forward_angle(int m);

/// Mean hop length from mid-curve m to mid-curve m-1 with the angular offset
/// uniform on [0, max_forward_angle(m)], by composite Simpson on `panels`
/// panels. m = 0 is the direct hop d_w / 2 to the base.
double expected_hop_distance(int m, double width, int panels = 256);

struct RelayCounts {
    std::vector<int> counts;
    int inner_formula = 0;
    std::vector<std::string> warnings;
};

/// Relay population per annulus. Annuli 1..k-2 follow the equal-drain
/// condition; the outermost has none; the innermost takes the leftover
/// budget. Throws PlanningError when the budget is negative.
RelayCounts relay_counts(int k, double width, const RadioParams& radio, double bits,
                         int node_count, int panels = 256);

/// Widths of the bands each mid-curve attracts, from the cumulative rule
/// sum_{i<=m} w_i = sqrt((R^2 / N) * sum_{j<=m} population_j).
std::vector<double> influence_widths(const AnnulusPlan& plan);

/// Fills sensing and relay slot angles. Sensing slots sit at slot_phase + 2 pi i / N_s,
/// relay slots at slot_phase + pi / lcm(N_s, N_r) + 2 pi j / N_r, so the two sets
/// never coincide.
void build_slots(AnnulusPlan& plan);

AnnulusPlan make_plan(const NetworkConfig& config, const PlanOptions& options = {});

struct Slot {
    int annulus = 0;
    Role role = Role::Sensing;
    double angle = 0.0;
    double radius = 0.0;

    Point position() const { return Point::polar(radius, angle); }
};

std::vector<Slot> slots_of(const AnnulusPlan& plan);

struct Assignment {
    int annulus = 0;
    int natural_band = 0;  // band the relaxed radius fell in before rebalancing
    Role role = Role::Sensing;
    double angle = 0.0;
    double radius = 0.0;
    double displacement = 0.0;
};

struct RoleAssignment {
    std::vector<Assignment> nodes;  // indexed like the relaxed positions
    double mean_displacement = 0.0;
    double max_displacement = 0.0;
    int rebalanced = 0;  // nodes moved to a band other than their natural one
};

/// Buckets relaxed nodes into influence bands, rebalances surplus nodes to the
/// radially adjacent band, then matches each band to its slots greedily by
/// ascending angular distance.
RoleAssignment assign_roles(std::span<const Point> relaxed, const AnnulusPlan& plan);

/// Base at index 0, then one node per assignment placed exactly on its slot
/// with full initial energy.
Network build_network(const RoleAssignment& assignment, double initial_energy);

/// Smallest absolute angular difference, in [0, pi].
double angular_distance(double a, double b);

}  // namespace vfem
