#include "vfem/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

namespace vfem {

int AnnulusPlan::sensing_total() const {
    int s = 0;
    for (const auto& a : annuli) s += a.sensing_count;
    return s;
}

int AnnulusPlan::total() const {
    int s = 0;
    for (const auto& a : annuli) s += a.total();
    return s;
}

int sensing_count(int m) {
    if (m < 0) throw std::domain_error("sensing_count: negative annulus");
    if (m == 0) return 1;
    const double q = 2.0 * m * m + 3.0 * m;
    return static_cast<int>(std::ceil(std::numbers::pi / std::acos((q - 1.0) / (q + 1.0))));
}

double max_forward_angle(int m) {
    if (m < 1) throw std::domain_error("max_forward_angle: annulus must be >= 1");
    const double mm = 2.0 * m * m;
    return std::acos((mm - 1.75) / (mm - 0.5));
}

double expected_hop_distance(int m, double width, int panels) {
    if (m < 0 || panels < 1) throw std::domain_error("expected_hop_distance: bad arguments");
    if (m == 0) return width / 2.0;
    const double outer = (m + 0.5) * width;
    const double inner = (m - 0.5) * width;
    const double span = max_forward_angle(m);
    auto hop = [&](double theta) {
        return std::sqrt(outer * outer + inner * inner - 2.0 * outer * inner * std::cos(theta));
    };
    const int n = panels % 2 == 0 ? panels : panels + 1;
    const double h = span / n;
    double sum = hop(0.0) + hop(span);
    for (int i = 1; i < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * hop(i * h);
    return (sum * h / 3.0) / span;
}

RelayCounts relay_counts(int k, double width, const RadioParams& radio, double bits,
                         int node_count, int panels) {
    if (k < 2) throw std::domain_error("relay_counts: need at least two annuli");
    std::vector<int> sensing(k);
    for (int m = 0; m < k; ++m) sensing[m] = sensing_count(m);

    RelayCounts out;
    out.counts.assign(k, 0);
    const double e_r = energy_receive(bits, radio);
    for (int m = 1; m <= k - 2; ++m) {
        const double e_t = energy_send(bits, expected_hop_distance(m, width, panels), radio);
        const int upstream = std::accumulate(sensing.begin() + m + 1, sensing.end(), 0);
        out.counts[m] = static_cast<int>(std::ceil((1.0 + e_r / e_t) * upstream));
    }

    const int outer_sensing = std::accumulate(sensing.begin() + 1, sensing.end(), 0);
    const double e_t_inner = energy_send(bits, width / 2.0, radio);
    out.inner_formula = static_cast<int>(std::ceil((1.0 + e_r / e_t_inner) * outer_sensing));

    const int committed = std::accumulate(sensing.begin(), sensing.end(), 0) +
                          std::accumulate(out.counts.begin() + 1, out.counts.end(), 0);
    const int leftover = node_count - committed;
    if (leftover < 0) {
        throw PlanningError("node budget " + std::to_string(node_count) + " is too small for " +
                                std::to_string(k) + " annuli; at least " +
                                std::to_string(committed) + " nodes are required",
                            committed);
    }
    out.counts[0] = leftover;
    if (leftover < outer_sensing) {
        out.warnings.push_back("innermost relay count " + std::to_string(leftover) +
                               " is below the " + std::to_string(outer_sensing) +
                               " upstream sensing nodes it serves");
    }
    return out;
}

std::vector<double> influence_widths(const AnnulusPlan& plan) {
    std::vector<double> widths;
    widths.reserve(plan.annuli.size());
    const double per_node = plan.radius * plan.radius / plan.node_count;
    double population = 0.0;
    double previous = 0.0;
    for (const auto& row : plan.annuli) {
        population += row.total();
        const double cumulative = std::sqrt(per_node * population);
        widths.push_back(cumulative - previous);
        previous = cumulative;
    }
    return widths;
}

void build_slots(AnnulusPlan& plan) {
    const double two_pi = 2.0 * std::numbers::pi;
    for (auto& row : plan.annuli) {
        row.sensing_angles.clear();
        row.relay_angles.clear();
        for (int i = 0; i < row.sensing_count; ++i) {
            row.sensing_angles.push_back(plan.slot_phase + two_pi * i / row.sensing_count);
        }
        if (row.relay_count == 0) continue;
        const double offset = std::numbers::pi / std::lcm(row.sensing_count, row.relay_count);
        for (int j = 0; j < row.relay_count; ++j) {
            row.relay_angles.push_back(plan.slot_phase + offset + two_pi * j / row.relay_count);
        }
    }
}

AnnulusPlan make_plan(const NetworkConfig& config, const PlanOptions& options) {
    AnnulusPlan plan;
    plan.k = config.annulus_count;
    plan.radius = config.radius;
    plan.width = config.annulus_width();
    plan.node_count = config.node_count;
    plan.slot_phase = options.slot_phase;

    auto relays = relay_counts(plan.k, plan.width, config.radio, config.bits_per_round,
                               config.node_count, options.quadrature_panels);
    plan.inner_relay_formula = relays.inner_formula;
    plan.warnings = std::move(relays.warnings);

    for (int m = 0; m < plan.k; ++m) {
        AnnulusRow row;
        row.index = m;
        row.sensing_count = sensing_count(m);
        row.relay_count = relays.counts[m];
        row.expected_hop = expected_hop_distance(m, plan.width, options.quadrature_panels);
        row.radius = (m + 0.5) * plan.width;
        plan.annuli.push_back(std::move(row));
    }
    const auto widths = influence_widths(plan);
    for (int m = 0; m < plan.k; ++m) plan.annuli[m].influence_width = widths[m];
    build_slots(plan);

    // Every node of C_m needs a relay of C_{m-1} inside its forwarding cone.
    for (int m = 1; m < plan.k; ++m) {
        const int inner_relays = plan.annuli[m - 1].relay_count;
        if (inner_relays == 0 ||
            2.0 * std::numbers::pi / inner_relays >= 2.0 * max_forward_angle(m)) {
            plan.warnings.push_back("relays of annulus " + std::to_string(m - 1) +
                                    " are too sparse to reach every node of annulus " +
                                    std::to_string(m));
        }
    }
    return plan;
}

std::vector<Slot> slots_of(const AnnulusPlan& plan) {
    std::vector<Slot> slots;
    for (const auto& row : plan.annuli) {
        for (double a : row.sensing_angles) slots.push_back({row.index, Role::Sensing, a, row.radius});
        for (double a : row.relay_angles) slots.push_back({row.index, Role::Relay, a, row.radius});
    }
    return slots;
}

double angular_distance(double a, double b) {
    const double two_pi = 2.0 * std::numbers::pi;
    double d = std::fmod(std::abs(a - b), two_pi);
    return d > std::numbers::pi ? two_pi - d : d;
}

RoleAssignment assign_roles(std::span<const Point> relaxed, const AnnulusPlan& plan) {
    const int n = static_cast<int>(relaxed.size());
    if (n != plan.total()) {
        throw std::invalid_argument("assign_roles: " + std::to_string(n) +
                                    " nodes for a plan of " + std::to_string(plan.total()));
    }
    RoleAssignment out;
    out.nodes.resize(n);

    std::vector<double> outer_edge;
    double cumulative = 0.0;
    for (const auto& row : plan.annuli) outer_edge.push_back(cumulative += row.influence_width);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < n; ++i) {
        const double r = relaxed[i].norm();
        const auto it = std::upper_bound(outer_edge.begin(), outer_edge.end(), r);
        out.nodes[i].natural_band =
            std::min(static_cast<int>(it - outer_edge.begin()), plan.k - 1);
    }

    // Moving the radially nearest surplus nodes across band edges until every
    // band holds its planned population is the same as cutting the
    // radius-sorted order at the cumulative planned counts.
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return relaxed[a].norm() < relaxed[b].norm();
    });

    std::size_t cursor = 0;
    for (const auto& row : plan.annuli) {
        std::vector<int> members(order.begin() + cursor, order.begin() + cursor + row.total());
        cursor += row.total();

        std::vector<Slot> slots;
        for (double a : row.sensing_angles) slots.push_back({row.index, Role::Sensing, a, row.radius});
        for (double a : row.relay_angles) slots.push_back({row.index, Role::Relay, a, row.radius});

        std::vector<std::tuple<double, int, int>> pairs;
        pairs.reserve(members.size() * slots.size());
        for (int node : members) {
            const double theta = relaxed[node].angle();
            for (int s = 0; s < static_cast<int>(slots.size()); ++s) {
                pairs.emplace_back(angular_distance(theta, slots[s].angle), node, s);
            }
        }
        std::sort(pairs.begin(), pairs.end());

        std::vector<bool> slot_taken(slots.size(), false);
        std::vector<bool> node_done(n, false);
        for (const auto& [gap, node, s] : pairs) {
            if (slot_taken[s] || node_done[node]) continue;
            slot_taken[s] = true;
            node_done[node] = true;
            auto& a = out.nodes[node];
            a.annulus = row.index;
            a.role = slots[s].role;
            a.angle = slots[s].angle;
            a.radius = slots[s].radius;
            a.displacement = distance(relaxed[node], slots[s].position());
        }
    }

    double total = 0.0;
    for (const auto& a : out.nodes) {
        total += a.displacement;
        out.max_displacement = std::max(out.max_displacement, a.displacement);
        if (a.annulus != a.natural_band) ++out.rebalanced;
    }
    out.mean_displacement = n > 0 ? total / n : 0.0;
    return out;
}

Network build_network(const RoleAssignment& assignment, double initial_energy) {
    Network net;
    net.reserve(assignment.nodes.size() + 1);
    net.push_back(Node{kBaseId, Point{}, Role::Base, -1, 0.0, true});
    NodeId id = 1;
    for (const auto& a : assignment.nodes) {
        net.push_back(Node{id++, Point::polar(a.radius, a.angle), a.role, a.annulus,
                           initial_energy, true});
    }
    return net;
}

}  // namespace vfem
