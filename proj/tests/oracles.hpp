#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library except for plain data types; every formula is re-derived from
// the geometry so a shared bug cannot make both sides agree.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "vfem/core.hpp"

namespace oracle {

constexpr double kPi = 3.14159265358979323846;
constexpr double kElec = 50e-9;
constexpr double kFs = 10e-12;
constexpr double kAmp = 0.0013e-12;

inline double send(double bits, double d) {
    const double crossover = std::sqrt(kFs / kAmp);
    return d < crossover ? bits * (kElec + kFs * d * d) : bits * (kElec + kAmp * d * d * d * d);
}

inline double receive(double bits) { return bits * kElec; }

// Area of N+1 regular hexagons of side l equals the disk area.
inline double lattice(double radius, int n) {
    const double hex_area_per_unit = 1.5 * std::sqrt(3.0);
    return std::sqrt(kPi * radius * radius / ((n + 1) * hex_area_per_unit));
}

// Law of cosines: sensor on mid-curve m, partner on mid-curve m-1, hop 1.5 d_w.
inline double forward_angle(int m) {
    const double a = m + 0.5, b = m - 0.5, c = 1.5;
    return std::acos((a * a + b * b - c * c) / (2 * a * b));
}

// Fewest evenly spaced sensors on mid-curve m whose 1.5 d_w discs reach the
// outer rim halfway between two neighbours.
inline int sensors_to_cover(int m) {
    if (m == 0) return 1;
    for (int n = 1;; ++n) {
        const double a = m + 1.0, b = m + 0.5, half = kPi / n;
        const double gap2 = a * a + b * b - 2 * a * b * std::cos(half);
        const double inner = m, gap2_inner = inner * inner + b * b - 2 * inner * b * std::cos(half);
        if (gap2 <= 2.25 + 1e-12 && gap2_inner <= 2.25 + 1e-12) return n;
    }
}

inline double hop_length(int m, double width, double theta) {
    const double a = (m + 0.5) * width, b = (m - 0.5) * width;
    return std::sqrt(a * a + b * b - 2 * a * b * std::cos(theta));
}

inline double hop_monte_carlo(int m, double width, int samples, std::uint64_t seed) {
    if (m == 0) return width / 2;
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> angle(0.0, forward_angle(m));
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) sum += hop_length(m, width, angle(gen));
    return sum / samples;
}

// Midpoint rule on a very fine grid; a second, quadrature-free-of-Simpson check.
inline double hop_midpoint(int m, double width, int cells = 200000) {
    if (m == 0) return width / 2;
    const double top = forward_angle(m);
    double sum = 0.0;
    for (int i = 0; i < cells; ++i) sum += hop_length(m, width, (i + 0.5) * top / cells);
    return sum / cells;
}

// Equal-drain relay rule for annuli 1..k-2, leftover for annulus 0.
struct Counts {
    std::vector<int> sensing;
    std::vector<int> relay;
    int inner_formula = 0;
};

inline Counts counts(int k, double radius, int n, double bits = 1000.0) {
    Counts c;
    const double width = radius / k;
    for (int m = 0; m < k; ++m) c.sensing.push_back(sensors_to_cover(m));
    c.relay.assign(k, 0);
    auto upstream = [&](int m) {
        int s = 0;
        for (int i = m + 1; i < k; ++i) s += c.sensing[i];
        return s;
    };
    for (int m = 1; m <= k - 2; ++m) {
        const double e_t = send(bits, hop_midpoint(m, width));
        c.relay[m] = static_cast<int>(std::ceil((1.0 + receive(bits) / e_t) * upstream(m) - 1e-9));
    }
    c.inner_formula =
        static_cast<int>(std::ceil((1.0 + receive(bits) / send(bits, width / 2)) * upstream(0) - 1e-9));
    int used = 0;
    for (int m = 0; m < k; ++m) used += c.sensing[m] + (m ? c.relay[m] : 0);
    c.relay[0] = n - used;
    return c;
}

// Upper bound on rounds C_0 can sustain: usable C_0 energy over its per-round
// drain with every upstream stream crossing one C_0 relay at d_w / 2.
inline double inner_ledger_rounds(int k, double radius, int n, double e0, double death,
                                  double bits = 1000.0) {
    const Counts c = counts(k, radius, n, bits);
    int upstream = 0;
    for (int m = 1; m < k; ++m) upstream += c.sensing[m];
    const double hop = radius / k / 2;
    const double drain = upstream * (receive(bits) + send(bits, hop)) + c.sensing[0] * send(bits, hop);
    return (c.sensing[0] + c.relay[0]) * (e0 - death) / drain;
}

inline double wrap_gap(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2 * kPi);
    return d > kPi ? 2 * kPi - d : d;
}

// Exhaustive best chain for one owner: every sequence of alive relays that
// descends one annulus per hop inside the owner's sector, scored as the sum of
// residual / hop^2 over relay transmissions. Ties: shorter, then smaller ids.
struct Chain {
    std::vector<int> relays;
    double weight = -1.0;
    double length = 0.0;
    bool found = false;
};

inline Chain best_chain(const vfem::Network& nodes, int owner, double width) {
    const vfem::Node& o = nodes[owner];
    Chain best;
    if (o.annulus == 0) {
        best.found = true;
        return best;
    }
    const double sector = forward_angle(o.annulus);
    const double reach = 1.5 * width;
    std::vector<std::vector<int>> by_annulus(o.annulus);
    for (const auto& n : nodes) {
        if (n.role != vfem::Role::Relay || !n.alive || n.annulus >= o.annulus) continue;
        if (wrap_gap(std::atan2(n.position.y, n.position.x), std::atan2(o.position.y, o.position.x)) > sector)
            continue;
        by_annulus[n.annulus].push_back(n.id);
    }
    std::vector<int> chain;
    std::function<void(int, vfem::Point)> walk = [&](int level, vfem::Point at) {
        if (level < 0) {
            double w = 0.0, len = 0.0;
            vfem::Point prev = o.position;
            for (std::size_t i = 0; i < chain.size(); ++i) {
                const vfem::Point p = nodes[chain[i]].position;
                len += std::hypot(p.x - prev.x, p.y - prev.y);
                const vfem::Point nxt = i + 1 < chain.size() ? nodes[chain[i + 1]].position : vfem::Point{};
                const double d = std::hypot(nxt.x - p.x, nxt.y - p.y);
                w += nodes[chain[i]].residual / (d * d);
                prev = p;
            }
            len += std::hypot(prev.x, prev.y);
            const double tol = 1e-12 * std::max(std::abs(w), std::abs(best.weight));
            bool take = !best.found || w > best.weight + tol;
            if (!take && std::abs(w - best.weight) <= tol) {
                take = len < best.length || (len == best.length && chain < best.relays);
            }
            if (take) best = Chain{chain, w, len, true};
            return;
        }
        for (int id : by_annulus[level]) {
            const vfem::Point p = nodes[id].position;
            if (std::hypot(p.x - at.x, p.y - at.y) > reach) continue;
            chain.push_back(id);
            walk(level - 1, p);
            chain.pop_back();
        }
    };
    walk(o.annulus - 1, o.position);
    return best;
}

inline int count_chains(const vfem::Network& nodes, int owner, double width) {
    const vfem::Node& o = nodes[owner];
    const double sector = forward_angle(o.annulus);
    int total = 0;
    std::function<void(int, vfem::Point)> walk = [&](int level, vfem::Point at) {
        if (level < 0) {
            ++total;
            return;
        }
        for (const auto& n : nodes) {
            if (n.role != vfem::Role::Relay || !n.alive || n.annulus != level) continue;
            if (wrap_gap(std::atan2(n.position.y, n.position.x), std::atan2(o.position.y, o.position.x)) > sector)
                continue;
            if (std::hypot(n.position.x - at.x, n.position.y - at.y) > 1.5 * width) continue;
            walk(level - 1, n.position);
        }
    };
    walk(o.annulus - 1, o.position);
    return total;
}

// Coefficient of variation of nearest-neighbour distances.
inline double nn_cv(const std::vector<vfem::Point>& pts) {
    std::vector<double> nn;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double best = 1e300;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i != j) best = std::min(best, std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
        }
        nn.push_back(best);
    }
    double mean = 0.0;
    for (double v : nn) mean += v;
    mean /= nn.size();
    double var = 0.0;
    for (double v : nn) var += (v - mean) * (v - mean);
    return std::sqrt(var / nn.size()) / mean;
}

}  // namespace oracle
