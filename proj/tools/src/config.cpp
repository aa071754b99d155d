#include "vfem/app/config.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace vfem::app {
namespace {

using nlohmann::json;

double number(const json& value, const std::string& key) {
    if (!value.is_number()) throw ConfigError(key, "expected a number");
    return value.get<double>();
}

std::int64_t integer(const json& value, const std::string& key) {
    if (!value.is_number_integer()) throw ConfigError(key, "expected an integer");
    return value.get<std::int64_t>();
}

int small_int(const json& value, const std::string& key) {
    const auto v = integer(value, key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw ConfigError(key, "out of range");
    }
    return static_cast<int>(v);
}

using Setter = std::function<void(RunConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["radius"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.radius = number(v, k); };
        t["nodes"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.node_count = small_int(v, k); };
        t["annuli"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.annulus_count = small_int(v, k); };
        t["bits_per_round"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.bits_per_round = number(v, k); };
        t["initial_energy"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.initial_energy = number(v, k); };
        t["death_threshold"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.death_threshold = number(v, k); };
        t["variance_threshold"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.variance_threshold = number(v, k); };
        t["eta"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.force.eta = number(v, k); };
        t["lambda"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.force.lambda = number(v, k); };
        t["beta"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.force.beta = number(v, k); };
        t["tau"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.force.tau = number(v, k); };
        t["friction"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.force.friction = number(v, k); };
        t["d0"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.force.d0 = number(v, k); };
        t["delta_l"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.force.delta_l = number(v, k); };
        t["step_scale"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.force.step_scale = number(v, k); };
        t["max_iters"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.force.max_iters = small_int(v, k); };
        t["convergence_eps"] = [](RunConfig& c, const json& v, const std::string& k) { c.network.force.convergence_eps = number(v, k); };
        t["seed"] = [](RunConfig& c, const json& v, const std::string& k) {
            if (!v.is_number_unsigned()) throw ConfigError(k, "expected a non-negative integer");
            c.network.rng_seed = v.get<std::uint64_t>();
        };
        t["rounds_cap"] = [](RunConfig& c, const json& v, const std::string& k) { c.sim.rounds_cap = small_int(v, k); };
        t["emit_every"] = [](RunConfig& c, const json& v, const std::string& k) { c.sim.emit_every = small_int(v, k); };
        return t;
    }();
    return table;
}

// Radio constants are read in nJ and pJ and rebuilt together.
void apply_radio(RunConfig& c, const json& doc) {
    const RadioParams& r = c.network.radio;
    double e_elec = r.e_elec(), eps_fs = r.eps_fs(), eps_amp = r.eps_amp();
    if (doc.contains("e_elec_nj")) e_elec = number(doc["e_elec_nj"], "e_elec_nj") / 1e9;
    if (doc.contains("eps_fs_pj")) eps_fs = number(doc["eps_fs_pj"], "eps_fs_pj") / 1e12;
    if (doc.contains("eps_amp_pj")) eps_amp = number(doc["eps_amp_pj"], "eps_amp_pj") / 1e12;
    c.network.radio = RadioParams(e_elec, eps_fs, eps_amp);
}

void apply_document(RunConfig& c, const json& doc) {
    if (!doc.is_object()) throw ConfigError("document", "expected a JSON object");
    for (const auto& item : doc.items()) {
        const std::string& key = item.key();
        if (key == "e_elec_nj" || key == "eps_fs_pj" || key == "eps_amp_pj" || key == "strategy") continue;
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(key, "unknown key");
        it->second(c, item.value(), key);
    }
    apply_radio(c, doc);
    if (doc.contains("strategy")) {
        if (!doc["strategy"].is_string()) throw ConfigError("strategy", "expected a string");
        c.strategy = doc["strategy"].get<std::string>();
    }
    if (c.sim.rounds_cap < 1) throw ConfigError("rounds_cap", "must be >= 1");
    if (c.sim.emit_every < 1) throw ConfigError("emit_every", "must be >= 1");
}

}  // namespace

RunConfig default_run_config() {
    RunConfig c;
    c.network = NetworkConfig{};
    return c;
}

RunConfig parse_config(std::string_view text) {
    RunConfig config = default_run_config();
    std::string_view trimmed = text;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
    if (trimmed.empty()) return config;

    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("document", "not valid JSON");
    // A manifest carries its config one level down.
    if (doc.is_object() && doc.value("record", "") == "manifest") {
        if (!doc.contains("config")) throw ConfigError("config", "manifest has no config object");
        json inner = doc["config"];
        if (doc.contains("strategy") && inner.is_object()) inner["strategy"] = doc["strategy"];
        doc = std::move(inner);
    }
    apply_document(config, doc);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot read " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

nlohmann::json config_to_json(const RunConfig& c) {
    const NetworkConfig& n = c.network;
    const ForceParams& f = n.force;
    return json{
        {"radius", n.radius},
        {"nodes", n.node_count},
        {"annuli", n.annulus_count},
        {"bits_per_round", n.bits_per_round},
        {"initial_energy", n.initial_energy},
        {"death_threshold", n.death_threshold},
        {"variance_threshold", n.variance_threshold},
        {"e_elec_nj", n.radio.e_elec() * 1e9},
        {"eps_fs_pj", n.radio.eps_fs() * 1e12},
        {"eps_amp_pj", n.radio.eps_amp() * 1e12},
        {"eta", f.eta},
        {"lambda", f.lambda},
        {"beta", f.beta},
        {"tau", f.tau},
        {"friction", f.friction},
        {"d0", f.d0},
        {"delta_l", f.delta_l},
        {"step_scale", f.step_scale},
        {"max_iters", f.max_iters},
        {"convergence_eps", f.convergence_eps},
        {"seed", n.rng_seed},
        {"rounds_cap", c.sim.rounds_cap},
        {"emit_every", c.sim.emit_every},
    };
}

}  // namespace vfem::app
