#pragma once

// Round-based lifetime engine. Each round every routable sensing stream sends
// `bits_per_round` bits to the base; each hop charges the transmitter
// energy_send over the real hop length and the receiver energy_receive. Deaths
// settle after all traffic, then routes are re-selected for the triggered
// owners.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vfem/core.hpp"
#include "vfem/planner.hpp"
#include "vfem/routing.hpp"
#include "vfem/vforce.hpp"

namespace vfem {

struct RoundMetrics {
    int round = 0;
    std::vector<double> annulus_residual;  // J
    std::vector<double> annulus_percent;   // % of that annulus' initial energy
    double total_residual = 0.0;
    int alive_sensing = 0;
    int alive_relay = 0;
    int delivered = 0;
    std::vector<NodeId> deaths;
    double charged = 0.0;  // energy spent this round
};

struct LifetimeSummary {
    std::string strategy;
    int planned_streams = 0;
    std::optional<int> first_death_round;  // FNDT
    int lifetime = 0;
    bool truncated = false;
    std::vector<double> final_annulus_percent;
    std::vector<double> final_annulus_mean_residual;  // J per node
    std::vector<int> annulus_population;
    double final_total_percent = 0.0;
};

struct SimOptions {
    int rounds_cap = 1'000'000;
    int emit_every = 100;
};

struct SimulationResult {
    LifetimeSummary summary;
    std::vector<RoundMetrics> series;  // round 0, every emit_every-th round, and the last
};

/// Mutable state of one run: nodes plus the energy ledger.
struct SimState {
    Network nodes;
    int annulus_count = 0;
    int round = 0;
    double initial_total = 0.0;
    double charged_total = 0.0;
    std::vector<double> annulus_initial;

    SimState(Network network, int annuli);
    double residual_total() const;
};

/// One VFEM round: traffic, death settlement, trigger evaluation, re-routing.
RoundMetrics run_round(SimState& state, RoutingState& routing, const AnnulusPlan& plan,
                       const NetworkConfig& config);

/// Metrics for the current state with no traffic; used for round 0.
RoundMetrics snapshot(const SimState& state, int delivered);

/// Runs VFEM rounds on an already planned network until a planned sensing
/// stream is permanently lost or the cap is hit.
SimulationResult simulate(Network network, const AnnulusPlan& plan, const NetworkConfig& config,
                          const SimOptions& options = {});

/// Full pipeline output short of the round loop.
struct Deployment {
    std::vector<Point> initial;
    RelaxationResult relaxation;
    AnnulusPlan plan;
    RoleAssignment assignment;
    Network network;
};

/// Uniform random deployment (Deployment stream), relaxation, planning and
/// slot assignment.
Deployment deploy(const NetworkConfig& config, const PlanOptions& plan_options = {});

/// deploy() followed by simulate().
SimulationResult run_to_completion(const NetworkConfig& config, const SimOptions& options = {});

enum class BaselineKind { UniformDirect, WuGeometric };

const char* to_string(BaselineKind kind);

/// Per-annulus populations growing by a factor 3 per annulus inward,
/// normalised to `node_count` by largest remainder.
std::vector<int> wu_populations(int annuli, int node_count);

/// Baseline layout: every node senses and relays. Annulus indices follow
/// floor(r / d_w).
Network baseline_network(BaselineKind kind, const NetworkConfig& config);

/// Greedy next hop for every node: the alive neighbour within 1.5 d_w that is
/// closest to the base (the base itself when in range); -1 when no neighbour is
/// strictly closer to the base than the node.
std::vector<NodeId> greedy_next_hops(const Network& nodes, double max_hop);

/// Baseline run with the same energy model and lifetime rule. Every node
/// connected to the base at round 0 is a planned stream. `node_count`
/// overrides config.node_count when given.
SimulationResult run_baseline(BaselineKind kind, NetworkConfig config, const SimOptions& options = {},
                              std::optional<int> node_count = std::nullopt);

/// Across-annulus spread (max - min) of residual percentages.
double annulus_spread(const RoundMetrics& metrics);

}  // namespace vfem
