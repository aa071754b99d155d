#pragma once

// Path selection inside each sensing node's data forwarding area: the sector
// of half-angle max_forward_angle(m) centred on the node. Every relay of a
// path lies in that sector, each hop descends one annulus and spans at most
// 1.5 d_w, and the chain with the largest residual-over-squared-hop weight
// wins.

#include <map>
#include <span>
#include <vector>

#include "vfem/core.hpp"
#include "vfem/planner.hpp"

namespace vfem {

struct ForwardingArea {
    NodeId owner = 0;
    double half_angle = 0.0;
    /// candidates[0] holds annulus m-1, candidates.back() annulus 0. Alive
    /// relays only, ascending id.
    std::vector<std::vector<NodeId>> candidates;

    std::size_t relay_total() const;
};

struct Path {
    NodeId owner = 0;
    std::vector<NodeId> relays;  // next hop first, annulus-0 relay last
    double weight = 0.0;
    double length = 0.0;  // owner to base, metres
};

struct Route {
    Path path;
    ForwardingArea area;
    bool routable = false;
};

struct RoutingState {
    std::map<NodeId, Route> routes;  // keyed by sensing node id

    std::vector<NodeId> unroutable() const;
};

ForwardingArea forwarding_area(const Node& owner, const Network& nodes, const AnnulusPlan& plan);

/// Depth-first product of the per-annulus candidates, dropping any hop longer
/// than 1.5 d_w. Deterministic order; empty when the owner is cut off.
std::vector<Path> enumerate_paths(const ForwardingArea& area, const Network& nodes,
                                  const AnnulusPlan& plan);

/// Sum over relay hops of residual(transmitter) / hop^2, the last hop being
/// the annulus-0 relay to the base. A path with no relays scores its owner's
/// direct hop. Throws std::domain_error on a zero-length hop.
double path_weight(const Path& path, const Network& nodes);

/// Total Euclidean length from owner to base.
double path_length(const Path& path, const Network& nodes);

/// True when `a` should be preferred to `b`: larger weight, then shorter
/// length, then the lexicographically smaller relay chain.
bool better_path(const Path& a, const Path& b);

/// Route for one sensing node against the current alive set.
Route select_route(const Node& owner, const Network& nodes, const AnnulusPlan& plan);

RoutingState select_paths(const Network& nodes, const AnnulusPlan& plan);

/// Re-selects the routes of exactly `owners`.
void reroute(RoutingState& state, const Network& nodes, const AnnulusPlan& plan,
             std::span<const NodeId> owners);

/// Population variance of a set of residual energies (J^2).
double residual_variance(std::span<const double> residuals);

/// Sensing nodes whose route must be re-selected: a relay on the route fell
/// below the death threshold, or the residual variance over the alive relays
/// of the forwarding area exceeds variance_threshold.
std::vector<NodeId> reselect_triggers(const RoutingState& state, const Network& nodes,
                                      const NetworkConfig& config);

}  // namespace vfem
