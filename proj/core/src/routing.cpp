#include "vfem/routing.hpp"

#include <algorithm>
#include <cmath>

namespace vfem {
namespace {

constexpr double kWeightTieTolerance = 1e-12;

const Node& node_at(const Network& nodes, NodeId id) { return nodes.at(static_cast<std::size_t>(id)); }

void extend(const ForwardingArea& area, const Network& nodes, double max_hop, std::size_t level,
            Path& partial, Point from, std::vector<Path>& out) {
    if (level == area.candidates.size()) {
        out.push_back(partial);
        return;
    }
    for (NodeId candidate : area.candidates[level]) {
        const Point at = node_at(nodes, candidate).position;
        if (distance(from, at) > max_hop) continue;
        partial.relays.push_back(candidate);
        extend(area, nodes, max_hop, level + 1, partial, at, out);
        partial.relays.pop_back();
    }
}

}  // namespace

std::size_t ForwardingArea::relay_total() const {
    std::size_t n = 0;
    for (const auto& level : candidates) n += level.size();
    return n;
}

std::vector<NodeId> RoutingState::unroutable() const {
    std::vector<NodeId> out;
    for (const auto& [id, route] : routes) {
        if (!route.routable) out.push_back(id);
    }
    return out;
}

ForwardingArea forwarding_area(const Node& owner, const Network& nodes, const AnnulusPlan&) {
    ForwardingArea area;
    area.owner = owner.id;
    if (owner.annulus < 1) return area;

    const int m = owner.annulus;
    area.half_angle = max_forward_angle(m);
    area.candidates.resize(m);
    const double theta = owner.position.angle();
    for (const Node& n : nodes) {
        if (n.role != Role::Relay || !n.alive || n.annulus < 0 || n.annulus >= m) continue;
        if (angular_distance(n.position.angle(), theta) > area.half_angle) continue;
        area.candidates[m - 1 - n.annulus].push_back(n.id);
    }
    return area;
}

std::vector<Path> enumerate_paths(const ForwardingArea& area, const Network& nodes,
                                  const AnnulusPlan& plan) {
    std::vector<Path> out;
    if (area.candidates.empty()) return out;
    Path partial;
    partial.owner = area.owner;
    extend(area, nodes, 1.5 * plan.width, 0, partial, node_at(nodes, area.owner).position, out);
    for (auto& p : out) {
        p.weight = path_weight(p, nodes);
        p.length = path_length(p, nodes);
    }
    return out;
}

double path_weight(const Path& path, const Network& nodes) {
    auto term = [&](NodeId from, Point to) {
        const Node& sender = node_at(nodes, from);
        const double d = distance(sender.position, to);
        if (!(d > 0.0)) throw std::domain_error("path_weight: zero-length hop");
        return sender.residual / (d * d);
    };
    if (path.relays.empty()) return term(path.owner, Point{});
    double w = 0.0;
    for (std::size_t i = 0; i + 1 < path.relays.size(); ++i) {
        w += term(path.relays[i], node_at(nodes, path.relays[i + 1]).position);
    }
    return w + term(path.relays.back(), Point{});
}

double path_length(const Path& path, const Network& nodes) {
    Point at = node_at(nodes, path.owner).position;
    double total = 0.0;
    for (NodeId r : path.relays) {
        const Point next = node_at(nodes, r).position;
        total += distance(at, next);
        at = next;
    }
    return total + at.norm();
}

bool better_path(const Path& a, const Path& b) {
    const double scale = std::max(std::abs(a.weight), std::abs(b.weight));
    if (std::abs(a.weight - b.weight) > kWeightTieTolerance * scale) return a.weight > b.weight;
    if (a.length != b.length) return a.length < b.length;
    return a.relays < b.relays;
}

Route select_route(const Node& owner, const Network& nodes, const AnnulusPlan& plan) {
    Route route;
    route.path.owner = owner.id;
    route.area = forwarding_area(owner, nodes, plan);
    if (owner.annulus == 0) {
        route.path.weight = path_weight(route.path, nodes);
        route.path.length = path_length(route.path, nodes);
        route.routable = true;
        return route;
    }
    const auto paths = enumerate_paths(route.area, nodes, plan);
    if (paths.empty()) return route;
    const Path* best = &paths.front();
    for (const Path& p : paths) {
        if (better_path(p, *best)) best = &p;
    }
    route.path = *best;
    route.routable = true;
    return route;
}

RoutingState select_paths(const Network& nodes, const AnnulusPlan& plan) {
    RoutingState state;
    for (const Node& n : nodes) {
        if (n.role == Role::Sensing && n.alive) state.routes[n.id] = select_route(n, nodes, plan);
    }
    return state;
}

void reroute(RoutingState& state, const Network& nodes, const AnnulusPlan& plan,
             std::span<const NodeId> owners) {
    for (NodeId id : owners) state.routes[id] = select_route(node_at(nodes, id), nodes, plan);
}

double residual_variance(std::span<const double> residuals) {
    if (residuals.empty()) return 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double e : residuals) {
        sum += e;
        sum_sq += e * e;
    }
    const double n = static_cast<double>(residuals.size());
    const double mean = sum / n;
    return std::max(0.0, sum_sq / n - mean * mean);
}

std::vector<NodeId> reselect_triggers(const RoutingState& state, const Network& nodes,
                                      const NetworkConfig& config) {
    std::vector<NodeId> out;
    std::vector<double> residuals;
    for (const auto& [id, route] : state.routes) {
        if (!route.routable || !node_at(nodes, id).alive || route.path.relays.empty()) continue;
        bool fire = std::any_of(route.path.relays.begin(), route.path.relays.end(), [&](NodeId r) {
            const Node& relay = node_at(nodes, r);
            return !relay.alive || relay.residual < config.death_threshold;
        });
        if (!fire) {
            residuals.clear();
            for (const auto& level : route.area.candidates) {
                for (NodeId r : level) {
                    const Node& relay = node_at(nodes, r);
                    if (relay.alive) residuals.push_back(relay.residual);
                }
            }
            fire = residual_variance(residuals) > config.variance_threshold;
        }
        if (fire) out.push_back(id);
    }
    return out;
}

}  // namespace vfem
