#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "vfem/sim.hpp"

using namespace vfem;

namespace {

Node make(NodeId id, Point p, Role role, int annulus, double residual = 2.0) {
    return Node{id, p, role, annulus, residual, true};
}

double inner_residual(const SimState& s) {
    double sum = 0.0;
    for (const Node& n : s.nodes)
        if (n.role != Role::Base && n.annulus == 0) sum += n.residual;
    return sum;
}

}  // namespace

TEST_CASE("single C_0 sensing node drains exactly one direct send") {
    NetworkConfig c = default_config();
    Network net{make(0, {}, Role::Base, -1, 0.0), make(1, {7.0, 3.0}, Role::Sensing, 0)};
    AnnulusPlan plan;
    plan.k = 4;
    plan.width = 25.0;
    SimState state(net, 4);
    RoutingState routing = select_paths(state.nodes, plan);
    const RoundMetrics m = run_round(state, routing, plan, c);
    CHECK(m.delivered == 1);
    CHECK(m.charged == doctest::Approx(oracle::send(1000, std::hypot(7.0, 3.0))).epsilon(1e-12));
    CHECK(state.nodes[1].residual == doctest::Approx(2.0 - m.charged).epsilon(1e-15));
}

TEST_CASE("no alive sensing nodes means no drain") {
    NetworkConfig c = default_config();
    Network net{make(0, {}, Role::Base, -1, 0.0), make(1, {12.5, 0.0}, Role::Relay, 0)};
    AnnulusPlan plan;
    plan.k = 4;
    plan.width = 25.0;
    SimState state(net, 4);
    RoutingState routing = select_paths(state.nodes, plan);
    const RoundMetrics m = run_round(state, routing, plan, c);
    CHECK(m.charged == 0.0);
    CHECK(m.delivered == 0);
    CHECK(state.residual_total() == 2.0);
}

TEST_CASE("first round on the default plan matches the hand ledger") {
    const NetworkConfig c = default_config();
    Deployment d = deploy(c);
    SimState state(d.network, d.plan.k);
    RoutingState routing = select_paths(state.nodes, d.plan);
    const double before = inner_residual(state);

    double network = 0.0;
    for (const auto& [owner, route] : routing.routes) {
        Point from = state.nodes[owner].position;
        for (NodeId r : route.path.relays) {
            const Point to = state.nodes[r].position;
            network += oracle::send(1000, std::hypot(to.x - from.x, to.y - from.y)) + oracle::receive(1000);
            from = to;
        }
        network += oracle::send(1000, std::hypot(from.x, from.y));
    }
    const RoundMetrics m = run_round(state, routing, d.plan, c);

    // 20 upstream streams each cost one C_0 relay a receive plus a 12.5 m send;
    // the C_0 sensing node sends 12.5 m itself.
    const double inner = 20 * (oracle::receive(1000) + oracle::send(1000, 12.5)) + oracle::send(1000, 12.5);
    CHECK(before - inner_residual(state) == doctest::Approx(inner).epsilon(1e-9));
    CHECK(inner == doctest::Approx(2.0828e-3).epsilon(1e-4));
    CHECK(m.charged == doctest::Approx(network).epsilon(1e-9));
    CHECK(m.delivered == 21);
}

TEST_CASE("ledger, monotonicity and no zombie traffic over a long run") {
    NetworkConfig c = default_config();
    c.initial_energy = 0.25;  // deaths within a few hundred rounds
    c.death_threshold = 0.2;
    Deployment d = deploy(c);
    SimState state(d.network, d.plan.k);
    RoutingState routing = select_paths(state.nodes, d.plan);
    std::vector<double> last(state.nodes.size());
    for (const Node& n : state.nodes) last[n.id] = n.residual;
    std::vector<int> died_at(state.nodes.size(), 0);

    for (int r = 1; r <= 1200; ++r) {
        const RoundMetrics m = run_round(state, routing, d.plan, c);
        const double lhs = state.initial_total;
        const double rhs = state.residual_total() + state.charged_total;
        CHECK(std::abs(lhs - rhs) <= 1e-9 * lhs);
        CHECK(m.delivered <= m.alive_sensing + static_cast<int>(m.deaths.size()));
        for (const Node& n : state.nodes) {
            CHECK(n.residual <= last[n.id]);
            if (died_at[n.id]) CHECK(n.residual == last[n.id]);
            last[n.id] = n.residual;
            CHECK(n.alive == (n.role == Role::Base || n.residual >= c.death_threshold));
        }
        for (NodeId id : m.deaths) died_at[id] = r;
    }
    CHECK(std::accumulate(died_at.begin(), died_at.end(), 0) > 0);
}

TEST_CASE("simulate summary and series") {
    NetworkConfig c = default_config();
    c.initial_energy = 0.3;
    SimOptions o;
    o.emit_every = 50;
    const SimulationResult r = run_to_completion(c, o);
    REQUIRE(r.series.size() >= 2);
    CHECK(r.series.front().round == 0);
    CHECK(r.series.back().round == r.summary.lifetime);
    CHECK(r.series.back().delivered < r.summary.planned_streams);
    REQUIRE(r.summary.first_death_round.has_value());
    CHECK(*r.summary.first_death_round <= r.summary.lifetime);
    CHECK_FALSE(r.summary.truncated);
    for (std::size_t i = 1; i + 1 < r.series.size(); ++i) CHECK(r.series[i].round % 50 == 0);
    for (std::size_t i = 1; i < r.series.size(); ++i)
        CHECK(r.series[i].total_residual <= r.series[i - 1].total_residual);
    CHECK(r.summary.annulus_population == std::vector<int>{36, 34, 24, 9});

    SUBCASE("cap truncates") {
        SimOptions capped;
        capped.rounds_cap = 10;
        const auto t = run_to_completion(c, capped);
        CHECK(t.summary.truncated);
        CHECK(t.summary.lifetime == 10);
        CHECK(t.series.back().round == 10);
    }
}

TEST_CASE("wu populations") {
    CHECK(wu_populations(6, 364) == std::vector<int>{243, 81, 27, 9, 3, 1});
    CHECK(wu_populations(4, 40) == std::vector<int>{27, 9, 3, 1});
    for (int n : {103, 200, 972, 7}) {
        const auto p = wu_populations(5, n);
        CHECK(std::accumulate(p.begin(), p.end(), 0) == n);
        for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] <= p[i - 1]);
    }
}

TEST_CASE("greedy next hops") {
    Network net{make(0, {}, Role::Base, -1, 0.0), make(1, {30.0, 0.0}, Role::Sensing, 1),
                make(2, {60.0, 0.0}, Role::Sensing, 2), make(3, {55.0, 5.0}, Role::Sensing, 2),
                make(4, {95.0, 0.0}, Role::Sensing, 3)};
    const auto next = greedy_next_hops(net, 37.5);
    CHECK(next[1] == kBaseId);
    CHECK(next[2] == 1);
    CHECK(next[3] == 1);
    CHECK(next[4] == 2);  // 3 is closer to the base but 40.3 m away
    net[1].alive = false;
    const auto cut = greedy_next_hops(net, 37.5);
    CHECK(cut[2] == 3);  // 3 is strictly closer to the base and in range
    CHECK(cut[3] == -1);
}

TEST_CASE("baselines") {
    NetworkConfig c = default_config();
    SimOptions o;
    o.emit_every = 1000;
    for (BaselineKind kind : {BaselineKind::UniformDirect, BaselineKind::WuGeometric}) {
        const auto a = run_baseline(kind, c, o);
        const auto b = run_baseline(kind, c, o);
        CHECK(a.summary.lifetime == b.summary.lifetime);
        CHECK(a.series.back().annulus_residual == b.series.back().annulus_residual);
        CHECK(a.summary.planned_streams <= c.node_count);
        CHECK(a.summary.planned_streams > c.node_count * 9 / 10);
        CHECK(std::string(to_string(kind)) == a.summary.strategy);
    }
    const Network wu = baseline_network(BaselineKind::WuGeometric, c);
    std::vector<int> pop(4, 0);
    for (const Node& n : wu)
        if (n.role != Role::Base) ++pop[n.annulus];
    CHECK(pop == wu_populations(4, 103));

    const auto bigger = run_baseline(BaselineKind::UniformDirect, c, o, 150);
    CHECK(bigger.summary.annulus_population.size() == 4);
    CHECK(std::accumulate(bigger.summary.annulus_population.begin(), bigger.summary.annulus_population.end(), 0) ==
          150);
}

TEST_CASE("annulus spread") {
    RoundMetrics m;
    m.annulus_percent = {85.5, 85.9, 84.7};
    CHECK(annulus_spread(m) == doctest::Approx(1.2));
    CHECK(annulus_spread(RoundMetrics{}) == 0.0);
}
