#pragma once

// Domain types, radio energy model and lattice geometry shared by every stage
// of the pipeline. All quantities are SI: metres, joules, bits.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfem {

/// Thrown when a configuration value breaks an invariant. `key()` names the
/// offending configuration key so the CLI can report it verbatim.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    constexpr Point operator+(Point o) const { return {x + o.x, y + o.y}; }
    constexpr Point operator-(Point o) const { return {x - o.x, y - o.y}; }
    constexpr Point operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Point&) const = default;

    double norm() const { return std::sqrt(x * x + y * y); }
    double angle() const { return std::atan2(y, x); }
    static Point polar(double radius, double theta) {
        return {radius * std::cos(theta), radius * std::sin(theta)};
    }
};

inline double distance(Point a, Point b) { return (a - b).norm(); }

/// Two-branch first-order radio model (free space below the crossover
/// distance, multipath above it).
class RadioParams {
public:
    /// e_elec in J/bit, eps_fs in J/(bit m^2), eps_amp in J/(bit m^4).
    RadioParams(double e_elec, double eps_fs, double eps_amp);

    /// 50 nJ/bit, 10 pJ/(bit m^2), 0.0013 pJ/(bit m^4).
    static RadioParams standard() { return {50e-9, 10e-12, 0.0013e-12}; }

    double e_elec() const { return e_elec_; }
    double eps_fs() const { return eps_fs_; }
    double eps_amp() const { return eps_amp_; }
    double d_threshold() const { return d_threshold_; }

private:
    double e_elec_;
    double eps_fs_;
    double eps_amp_;
    double d_threshold_;
};

/// Energy to transmit `bits` over `d` metres.
double energy_send(double bits, double d, const RadioParams& radio);
/// Energy to receive `bits`; distance independent.
double energy_receive(double bits, const RadioParams& radio);

/// Side of the regular hexagon such that N+1 hexagons tile a disk of radius R:
/// (N+1) * (3 sqrt(3) / 2) * l^2 == pi R^2. Target neighbour spacing is sqrt(3) l.
double lattice_spacing(double radius, int node_count);

struct ForceParams {
    double eta = 5400.0;   // repulsion coefficient
    double lambda = 0.23;  // gravitation coefficient
    double beta = 2.0;     // pairwise distance exponent
    double tau = 1.7;      // boundary distance exponent
    double d0 = 0.0;       // buffering distance (m)
    double delta_l = 0.0;  // boundary influence depth (m)
    double friction = 30.0;
    double step_scale = 1e-3;  // m of displacement per unit of surplus force
    int max_iters = 5000;
    double convergence_eps = 0.01;  // m

    /// Fills d0 = sqrt(3) l / 3 and delta_l = 0.1 l when they are unset (<= 0).
    ForceParams resolved(double lattice) const;

    /// Smallest virtual force any interaction can produce; friction must stay
    /// strictly below it for the lattice to be reachable.
    double friction_bound(double lattice) const;
};

enum class Role { Sensing, Relay, Base };

const char* to_string(Role role);

struct NetworkConfig {
    double radius = 100.0;
    int node_count = 103;
    int annulus_count = 4;
    double bits_per_round = 1000.0;
    double initial_energy = 2.0;
    double death_threshold = 0.2;
    RadioParams radio = RadioParams::standard();
    ForceParams force;              // d0 / delta_l resolved against lattice_spacing()
    double variance_threshold = 0.01;  // J^2
    std::uint64_t rng_seed = 1;

    double annulus_width() const { return radius / annulus_count; }
    double lattice() const { return lattice_spacing(radius, node_count); }
};

/// Stock parameters with k = 4 and force lengths resolved.
NetworkConfig default_config();

/// Re-derives unset force lengths for the current geometry, then checks every
/// invariant. Throws ConfigError naming the first offending key.
NetworkConfig finalize(NetworkConfig config);
void validate(const NetworkConfig& config);

using NodeId = int;

struct Node {
    NodeId id = 0;
    Point position;
    Role role = Role::Sensing;
    int annulus = -1;
    double residual = 0.0;
    bool alive = true;
};

/// Node 0 is always the base station at the origin; sensors are 1..N.
using Network = std::vector<Node>;

inline constexpr NodeId kBaseId = 0;

}  // namespace vfem
