#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "vfem/routing.hpp"
#include "vfem/sim.hpp"

using namespace vfem;

namespace {

struct Fixture {
    NetworkConfig config;
    AnnulusPlan plan;
    Network nodes;
};

Fixture planned(int n, int k) {
    Fixture f;
    f.config = default_config();
    f.config.node_count = n;
    f.config.annulus_count = k;
    f.config = finalize(f.config);
    Deployment d = deploy(f.config);
    f.plan = d.plan;
    f.nodes = d.network;
    return f;
}

Node at(NodeId id, Point p, Role role, int annulus, double residual) {
    return Node{id, p, role, annulus, residual, true};
}

}  // namespace

TEST_CASE("path weight") {
    Network nodes{at(0, {}, Role::Base, -1, 0.0), at(1, {60.0, 0.0}, Role::Sensing, 2, 2.0),
                  at(2, {37.5, 0.0}, Role::Relay, 1, 2.0), at(3, {12.5, 0.0}, Role::Relay, 0, 2.0)};
    Path p;
    p.owner = 1;
    p.relays = {2, 3};
    CHECK(path_weight(p, nodes) == doctest::Approx(0.0160).epsilon(1e-12));
    CHECK(path_length(p, nodes) == doctest::Approx(60.0));

    Path direct;
    direct.owner = 3;
    CHECK(path_weight(direct, nodes) == doctest::Approx(0.0128));

    nodes[2].residual = 4.0;
    nodes[3].residual = 4.0;
    CHECK(path_weight(p, nodes) == doctest::Approx(0.0320));

    nodes[2].position = nodes[3].position;
    CHECK_THROWS_AS(path_weight(p, nodes), std::domain_error);
}

TEST_CASE("residual variance") {
    const std::vector<double> two{2.0, 1.0};
    CHECK(residual_variance(two) == doctest::Approx(0.25));
    const std::vector<double> flat(7, 1.3);
    CHECK(residual_variance(flat) == doctest::Approx(0.0));
    CHECK(residual_variance(std::vector<double>{}) == 0.0);
}

TEST_CASE("tie breaking") {
    Path a, b;
    a.weight = 1.0;
    b.weight = 1.0 + 1e-15;
    a.length = 10.0;
    b.length = 11.0;
    CHECK(better_path(a, b));
    b.length = 10.0;
    a.relays = {1, 5};
    b.relays = {1, 4};
    CHECK(better_path(b, a));
    b.weight = 1.1;
    CHECK(better_path(b, a));
}

TEST_CASE("enumeration") {
    SUBCASE("one candidate per level gives one path") {
        Network nodes{at(0, {}, Role::Base, -1, 0.0), at(1, {62.5, 0.0}, Role::Sensing, 2, 2.0),
                      at(2, {37.5, 0.0}, Role::Relay, 1, 2.0), at(3, {12.5, 0.0}, Role::Relay, 0, 2.0)};
        AnnulusPlan plan;
        plan.k = 3;
        plan.width = 25.0;
        const auto area = forwarding_area(nodes[1], nodes, plan);
        CHECK(area.candidates.size() == 2);
        CHECK(enumerate_paths(area, nodes, plan).size() == 1);
        nodes[2].alive = false;
        const auto cut = forwarding_area(nodes[1], nodes, plan);
        CHECK(cut.candidates[0].empty());
        CHECK(enumerate_paths(cut, nodes, plan).empty());
        CHECK_FALSE(select_route(nodes[1], nodes, plan).routable);
    }
    SUBCASE("product without pruning") {
        Network nodes{at(0, {}, Role::Base, -1, 0.0), at(1, {62.5, 0.0}, Role::Sensing, 2, 2.0)};
        NodeId id = 2;
        for (double a : {-0.05, 0.05}) nodes.push_back(at(id++, Point::polar(37.5, a), Role::Relay, 1, 2.0));
        for (double a : {-0.1, 0.0, 0.1}) nodes.push_back(at(id++, Point::polar(12.5, a), Role::Relay, 0, 2.0));
        AnnulusPlan plan;
        plan.k = 3;
        plan.width = 25.0;
        CHECK(enumerate_paths(forwarding_area(nodes[1], nodes, plan), nodes, plan).size() == 6);
    }
}

TEST_CASE("round-0 selection matches the exhaustive oracle") {
    for (auto [n, k] : {std::pair{103, 4}, std::pair{200, 5}}) {
        const Fixture f = planned(n, k);
        const RoutingState state = select_paths(f.nodes, f.plan);
        int owners = 0;
        for (const Node& node : f.nodes) {
            if (node.role != Role::Sensing) continue;
            ++owners;
            const auto ref = oracle::best_chain(f.nodes, node.id, f.plan.width);
            const Route& route = state.routes.at(node.id);
            REQUIRE(ref.found);
            CHECK(route.routable);
            CHECK(route.path.relays == ref.relays);
        }
        CHECK(owners == f.plan.sensing_total());
        CHECK(state.unroutable().empty());
    }
}

TEST_CASE("selected paths respect descent, hop and sector bounds") {
    const Fixture f = planned(200, 5);
    const RoutingState state = select_paths(f.nodes, f.plan);
    for (const auto& [owner, route] : state.routes) {
        const Node& o = f.nodes[owner];
        int expect = o.annulus - 1;
        Point prev = o.position;
        for (NodeId r : route.path.relays) {
            const Node& relay = f.nodes[r];
            CHECK(relay.role == Role::Relay);
            CHECK(relay.annulus == expect--);
            const double hop = distance(prev, relay.position);
            CHECK(hop > 0.0);
            CHECK(hop <= 1.5 * f.plan.width);
            CHECK(angular_distance(relay.position.angle(), o.position.angle()) <= max_forward_angle(o.annulus));
            prev = relay.position;
        }
        CHECK(expect == -1);
    }
}

TEST_CASE("argmax is invariant under uniform residual scaling") {
    Fixture f = planned(103, 4);
    // Perturb residuals so the choice is not purely geometric.
    for (Node& n : f.nodes)
        if (n.role == Role::Relay) n.residual = 1.0 + 0.01 * ((n.id * 37) % 23);
    const RoutingState a = select_paths(f.nodes, f.plan);
    for (Node& n : f.nodes) n.residual *= 3.7;
    const RoutingState b = select_paths(f.nodes, f.plan);
    for (const auto& [owner, route] : a.routes) CHECK(route.path.relays == b.routes.at(owner).path.relays);
}

TEST_CASE("raising a residual on the best path keeps it best") {
    Fixture f = planned(103, 4);
    const RoutingState a = select_paths(f.nodes, f.plan);
    for (const auto& [owner, route] : a.routes) {
        if (route.path.relays.empty()) continue;
        Network boosted = f.nodes;
        boosted[route.path.relays.front()].residual += 0.5;
        CHECK(select_route(boosted[owner], boosted, f.plan).path.relays == route.path.relays);
    }
}

TEST_CASE("reselect triggers") {
    Fixture f = planned(103, 4);
    RoutingState state = select_paths(f.nodes, f.plan);
    CHECK(reselect_triggers(state, f.nodes, f.config).empty());

    const auto& [owner, route] = *std::find_if(state.routes.begin(), state.routes.end(),
                                               [](const auto& kv) { return kv.second.path.relays.size() >= 2; });
    SUBCASE("a relay on the path below the death threshold") {
        f.nodes[route.path.relays.back()].residual = 0.19;
        const auto fired = reselect_triggers(state, f.nodes, f.config);
        CHECK(std::find(fired.begin(), fired.end(), owner) != fired.end());
    }
    SUBCASE("variance over the area") {
        const NodeId victim = route.area.candidates.front().front();
        f.nodes[victim].residual = 1.0;
        const auto fired = reselect_triggers(state, f.nodes, f.config);
        CHECK(std::find(fired.begin(), fired.end(), owner) != fired.end());
    }
    SUBCASE("reroute avoids a dead relay") {
        const NodeId dead = route.path.relays.front();
        f.nodes[dead].alive = false;
        const std::vector<NodeId> who{owner};
        reroute(state, f.nodes, f.plan, who);
        const auto& fresh = state.routes.at(owner).path.relays;
        CHECK(std::find(fresh.begin(), fresh.end(), dead) == fresh.end());
    }
}

TEST_CASE("a quarter turn of the whole network keeps every selection") {
    const Fixture f = planned(103, 4);
    Network turned = f.nodes;
    for (Node& n : turned) n.position = {-n.position.y, n.position.x};
    const RoutingState a = select_paths(f.nodes, f.plan);
    const RoutingState b = select_paths(turned, f.plan);
    for (const auto& [owner, route] : a.routes) CHECK(route.path.relays == b.routes.at(owner).path.relays);
}
