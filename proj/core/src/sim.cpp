#include "vfem/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vfem/rng.hpp"

namespace vfem {
namespace {

Node& node_ref(SimState& state, NodeId id) { return state.nodes[static_cast<std::size_t>(id)]; }

void charge(SimState& state, Node& node, double amount) {
    const double spent = std::min(amount, node.residual);
    node.residual -= spent;
    state.charged_total += spent;
}

// Charges one packet along owner -> hops... -> base. Returns energy spent.
double send_along(SimState& state, NodeId owner, std::span<const NodeId> hops,
                  const NetworkConfig& config) {
    const double before = state.charged_total;
    const double bits = config.bits_per_round;
    NodeId sender = owner;
    for (NodeId receiver : hops) {
        Node& tx = node_ref(state, sender);
        Node& rx = node_ref(state, receiver);
        charge(state, tx, energy_send(bits, distance(tx.position, rx.position), config.radio));
        charge(state, rx, energy_receive(bits, config.radio));
        sender = receiver;
    }
    Node& last = node_ref(state, sender);
    charge(state, last, energy_send(bits, last.position.norm(), config.radio));
    return state.charged_total - before;
}

std::vector<NodeId> settle_deaths(SimState& state, const NetworkConfig& config) {
    std::vector<NodeId> deaths;
    for (Node& n : state.nodes) {
        if (n.role == Role::Base || !n.alive) continue;
        if (n.residual < config.death_threshold) {
            n.alive = false;
            deaths.push_back(n.id);
        }
    }
    return deaths;
}

LifetimeSummary summarize(const SimState& state, const RoundMetrics& last, int planned) {
    LifetimeSummary s;
    s.planned_streams = planned;
    s.final_annulus_percent = last.annulus_percent;
    s.annulus_population.assign(state.annulus_count, 0);
    for (const Node& n : state.nodes) {
        if (n.role != Role::Base) ++s.annulus_population[n.annulus];
    }
    for (int m = 0; m < state.annulus_count; ++m) {
        const int pop = s.annulus_population[m];
        s.final_annulus_mean_residual.push_back(pop > 0 ? last.annulus_residual[m] / pop : 0.0);
    }
    s.final_total_percent =
        state.initial_total > 0.0 ? 100.0 * last.total_residual / state.initial_total : 0.0;
    return s;
}

// Shared lifetime loop; `round` advances the state one round.
template <typename RoundFn>
SimulationResult run_loop(SimState& state, int planned, const SimOptions& options, RoundFn&& round) {
    SimulationResult result;
    result.series.push_back(snapshot(state, planned));
    std::optional<int> first_death;
    RoundMetrics last = result.series.back();
    bool ended = false;
    for (int r = 1; r <= options.rounds_cap; ++r) {
        last = round();
        if (!first_death && !last.deaths.empty()) first_death = r;
        if (last.delivered < planned) {
            ended = true;
            break;
        }
        if (options.emit_every > 0 && r % options.emit_every == 0) result.series.push_back(last);
    }
    if (result.series.back().round != last.round) result.series.push_back(last);
    result.summary = summarize(state, last, planned);
    result.summary.first_death_round = first_death;
    result.summary.lifetime = last.round;
    result.summary.truncated = !ended;
    return result;
}

}  // namespace

SimState::SimState(Network network, int annuli) : nodes(std::move(network)), annulus_count(annuli) {
    annulus_initial.assign(annuli, 0.0);
    for (const Node& n : nodes) {
        if (n.role == Role::Base) continue;
        initial_total += n.residual;
        annulus_initial.at(n.annulus) += n.residual;
    }
}

double SimState::residual_total() const {
    double total = 0.0;
    for (const Node& n : nodes) {
        if (n.role != Role::Base) total += n.residual;
    }
    return total;
}

RoundMetrics snapshot(const SimState& state, int delivered) {
    RoundMetrics m;
    m.round = state.round;
    m.delivered = delivered;
    m.annulus_residual.assign(state.annulus_count, 0.0);
    for (const Node& n : state.nodes) {
        if (n.role == Role::Base) continue;
        m.annulus_residual[n.annulus] += n.residual;
        m.total_residual += n.residual;
        if (!n.alive) continue;
        if (n.role == Role::Sensing) ++m.alive_sensing;
        if (n.role == Role::Relay) ++m.alive_relay;
    }
    for (int a = 0; a < state.annulus_count; ++a) {
        const double initial = state.annulus_initial[a];
        m.annulus_percent.push_back(initial > 0.0 ? 100.0 * m.annulus_residual[a] / initial : 0.0);
    }
    return m;
}

RoundMetrics run_round(SimState& state, RoutingState& routing, const AnnulusPlan& plan,
                       const NetworkConfig& config) {
    ++state.round;
    int delivered = 0;
    double spent = 0.0;
    for (const auto& [owner, route] : routing.routes) {
        if (!route.routable || !node_ref(state, owner).alive) continue;
        spent += send_along(state, owner, route.path.relays, config);
        ++delivered;
    }
    auto deaths = settle_deaths(state, config);
    const auto triggered = reselect_triggers(routing, state.nodes, config);
    reroute(routing, state.nodes, plan, triggered);

    RoundMetrics m = snapshot(state, delivered);
    m.deaths = std::move(deaths);
    m.charged = spent;
    return m;
}

SimulationResult simulate(Network network, const AnnulusPlan& plan, const NetworkConfig& config,
                          const SimOptions& options) {
    SimState state(std::move(network), plan.k);
    RoutingState routing = select_paths(state.nodes, plan);
    auto result = run_loop(state, plan.sensing_total(), options,
                           [&] { return run_round(state, routing, plan, config); });
    result.summary.strategy = "vfem";
    return result;
}

Deployment deploy(const NetworkConfig& config, const PlanOptions& plan_options) {
    Deployment d;
    Rng rng(config.rng_seed, Stream::Deployment);
    d.initial = uniform_disk(rng, config.node_count, config.radius);
    d.relaxation = relax(d.initial, config);
    d.plan = make_plan(config, plan_options);
    d.assignment = assign_roles(d.relaxation.positions, d.plan);
    d.network = build_network(d.assignment, config.initial_energy);
    return d;
}

SimulationResult run_to_completion(const NetworkConfig& config, const SimOptions& options) {
    Deployment d = deploy(config);
    return simulate(std::move(d.network), d.plan, config, options);
}

const char* to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::UniformDirect: return "uniform";
        case BaselineKind::WuGeometric: return "wu";
    }
    return "?";
}

std::vector<int> wu_populations(int annuli, int node_count) {
    std::vector<double> weight(annuli);
    for (int m = 0; m < annuli; ++m) weight[m] = std::pow(3.0, annuli - 1 - m);
    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);

    std::vector<int> pop(annuli);
    std::vector<std::pair<double, int>> remainder;
    int assigned = 0;
    for (int m = 0; m < annuli; ++m) {
        const double exact = node_count * weight[m] / total;
        pop[m] = static_cast<int>(std::floor(exact));
        assigned += pop[m];
        remainder.emplace_back(exact - pop[m], m);
    }
    // Largest remainder first; ties go to the inner annulus.
    std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (int i = 0; assigned < node_count; ++i, ++assigned) ++pop[remainder[i].second];
    return pop;
}

Network baseline_network(BaselineKind kind, const NetworkConfig& config) {
    const double width = config.annulus_width();
    std::vector<Point> points;
    if (kind == BaselineKind::UniformDirect) {
        Rng rng(config.rng_seed, Stream::UniformBaseline);
        points = uniform_disk(rng, config.node_count, config.radius);
    } else {
        Rng rng(config.rng_seed, Stream::WuBaseline);
        const auto pop = wu_populations(config.annulus_count, config.node_count);
        for (int m = 0; m < config.annulus_count; ++m) {
            auto ring = uniform_annulus(rng, pop[m], m * width, (m + 1) * width);
            points.insert(points.end(), ring.begin(), ring.end());
        }
    }
    Network net;
    net.push_back(Node{kBaseId, Point{}, Role::Base, -1, 0.0, true});
    NodeId id = 1;
    for (Point p : points) {
        const int annulus =
            std::min(static_cast<int>(p.norm() / width), config.annulus_count - 1);
        net.push_back(Node{id++, p, Role::Sensing, annulus, config.initial_energy, true});
    }
    return net;
}

std::vector<NodeId> greedy_next_hops(const Network& nodes, double max_hop) {
    std::vector<NodeId> next(nodes.size(), -1);
    for (const Node& n : nodes) {
        if (n.role == Role::Base || !n.alive) continue;
        const double own = n.position.norm();
        if (own <= max_hop) {
            next[n.id] = kBaseId;
            continue;
        }
        double best = own;
        for (const Node& other : nodes) {
            if (other.role == Role::Base || !other.alive || other.id == n.id) continue;
            const double r = other.position.norm();
            if (r < best && distance(n.position, other.position) <= max_hop) {
                best = r;
                next[n.id] = other.id;
            }
        }
    }
    return next;
}

SimulationResult run_baseline(BaselineKind kind, NetworkConfig config, const SimOptions& options,
                              std::optional<int> node_count) {
    if (node_count) config.node_count = *node_count;
    const double max_hop = 1.5 * config.annulus_width();
    SimState state(baseline_network(kind, config), config.annulus_count);
    std::vector<NodeId> next = greedy_next_hops(state.nodes, max_hop);
    std::vector<NodeId> hops;

    auto reaches_base = [&](NodeId id) {
        NodeId at = next[id];
        while (at > 0) at = next[at];
        return at == kBaseId;
    };
    // Streams are planned for the nodes connected at deployment time; an
    // isolated node never counts as a lost stream.
    int planned = 0;
    for (const Node& n : state.nodes) {
        if (n.role != Role::Base && reaches_base(n.id)) ++planned;
    }

    auto round = [&] {
        ++state.round;
        int delivered = 0;
        double spent = 0.0;
        for (const Node& src : state.nodes) {
            if (src.role == Role::Base || !src.alive) continue;
            if (!reaches_base(src.id)) continue;
            hops.clear();
            NodeId at = next[src.id];
            while (at > 0) {
                hops.push_back(at);
                at = next[at];
            }
            spent += send_along(state, src.id, hops, config);
            ++delivered;
        }
        auto deaths = settle_deaths(state, config);
        if (!deaths.empty()) next = greedy_next_hops(state.nodes, max_hop);
        RoundMetrics m = snapshot(state, delivered);
        m.deaths = std::move(deaths);
        m.charged = spent;
        return m;
    };
    auto result = run_loop(state, planned, options, round);
    result.summary.strategy = to_string(kind);
    return result;
}

double annulus_spread(const RoundMetrics& metrics) {
    if (metrics.annulus_percent.empty()) return 0.0;
    const auto [lo, hi] =
        std::minmax_element(metrics.annulus_percent.begin(), metrics.annulus_percent.end());
    return *hi - *lo;
}

}  // namespace vfem
