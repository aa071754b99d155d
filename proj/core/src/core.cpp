#include "vfem/core.hpp"

#include <algorithm>

namespace vfem {

RadioParams::RadioParams(double e_elec, double eps_fs, double eps_amp)
    : e_elec_(e_elec), eps_fs_(eps_fs), eps_amp_(eps_amp) {
    if (!(e_elec > 0.0)) throw ConfigError("e_elec_nj", "must be > 0");
    if (!(eps_fs > 0.0)) throw ConfigError("eps_fs_pj", "must be > 0");
    if (!(eps_amp > 0.0)) throw ConfigError("eps_amp_pj", "must be > 0");
    d_threshold_ = std::sqrt(eps_fs / eps_amp);
}

double energy_send(double bits, double d, const RadioParams& radio) {
    if (d < radio.d_threshold()) {
        return bits * radio.e_elec() + bits * radio.eps_fs() * d * d;
    }
    const double d2 = d * d;
    return bits * radio.e_elec() + bits * radio.eps_amp() * d2 * d2;
}

double energy_receive(double bits, const RadioParams& radio) { return bits * radio.e_elec(); }

double lattice_spacing(double radius, int node_count) {
    if (!(radius > 0.0) || node_count < 1) {
        throw std::domain_error("lattice_spacing: radius and node count must be positive");
    }
    return radius * std::sqrt(2.0 * std::numbers::pi /
                              (3.0 * std::numbers::sqrt3 * (node_count + 1.0)));
}

ForceParams ForceParams::resolved(double lattice) const {
    ForceParams out = *this;
    if (out.d0 <= 0.0) out.d0 = std::numbers::sqrt3 * lattice / 3.0;
    if (out.delta_l <= 0.0) out.delta_l = 0.1 * lattice;
    return out;
}

double ForceParams::friction_bound(double lattice) const {
    const double target = std::numbers::sqrt3 * lattice;
    return std::min({lambda * std::pow(target, beta), eta / std::pow(target - d0, beta),
                     eta / std::pow(delta_l, tau)});
}

const char* to_string(Role role) {
    switch (role) {
        case Role::Sensing: return "sensing";
        case Role::Relay: return "relay";
        case Role::Base: return "base";
    }
    return "?";
}

NetworkConfig default_config() { return finalize(NetworkConfig{}); }

NetworkConfig finalize(NetworkConfig config) {
    if (config.radius > 0.0 && config.node_count >= 1) {
        config.force = config.force.resolved(config.lattice());
    }
    validate(config);
    return config;
}

void validate(const NetworkConfig& c) {
    if (!(c.radius > 0.0)) throw ConfigError("radius", "must be > 0");
    if (c.node_count < 2) throw ConfigError("nodes", "must be >= 2");
    if (c.annulus_count < 2) throw ConfigError("annuli", "must be >= 2");
    if (!(c.bits_per_round > 0.0)) throw ConfigError("bits_per_round", "must be > 0");
    if (!(c.initial_energy > 0.0)) throw ConfigError("initial_energy", "must be > 0");
    if (!(c.death_threshold >= 0.0 && c.death_threshold < c.initial_energy)) {
        throw ConfigError("death_threshold", "must lie in [0, initial_energy)");
    }
    if (!(c.variance_threshold >= 0.0)) throw ConfigError("variance_threshold", "must be >= 0");

    const ForceParams& f = c.force;
    const double l = c.lattice();
    const double target = std::numbers::sqrt3 * l;
    if (!(f.eta >= 0.0)) throw ConfigError("eta", "must be >= 0");
    if (!(f.lambda >= 0.0)) throw ConfigError("lambda", "must be >= 0");
    if (!(f.beta > 0.0)) throw ConfigError("beta", "must be > 0");
    if (!(f.tau > 0.0)) throw ConfigError("tau", "must be > 0");
    if (!(f.d0 > 0.0 && f.d0 < target / 2.0)) {
        throw ConfigError("d0", "must lie in (0, sqrt(3) l / 2) = (0, " +
                                    std::to_string(target / 2.0) + ")");
    }
    if (!(f.delta_l > 0.0)) throw ConfigError("delta_l", "must be > 0");
    if (!(f.friction >= 0.0)) throw ConfigError("friction", "must be >= 0");
    if (!(f.step_scale > 0.0)) throw ConfigError("step_scale", "must be > 0");
    if (f.max_iters < 1) throw ConfigError("max_iters", "must be >= 1");
    if (!(f.convergence_eps > 0.0)) throw ConfigError("convergence_eps", "must be > 0");

    const double bound = f.friction_bound(l);
    if (!(f.friction < bound)) {
        // Name the coefficient that pins the bound so the user knows what to change.
        std::string key = "friction";
        if (bound == f.eta / std::pow(target - f.d0, f.beta) ||
            bound == f.eta / std::pow(f.delta_l, f.tau)) {
            key = f.eta <= 0.0 ? "eta" : "friction";
        } else if (f.lambda <= 0.0) {
            key = "lambda";
        }
        throw ConfigError(key, "friction " + std::to_string(f.friction) +
                                   " must be below the smallest virtual force " +
                                   std::to_string(bound));
    }
}

}  // namespace vfem
