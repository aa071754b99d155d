#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vfem/app/pipeline.hpp"

int main(int argc, char** argv) {
    using namespace vfem::app;

    CLI::App app{"Energy-hole mitigation planner and lifetime simulator"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    app.fallthrough();

    CommandOptions opts;
    std::string config_path;
    std::string strategy;
    std::uint64_t seed = 0;
    int annuli = 0, nodes = 0, rounds_cap = 0, emit_every = 0;

    auto* o_config = app.add_option("--config", config_path, "JSON config or manifest to replay")
                         ->check(CLI::ExistingFile);
    auto* o_seed = app.add_option("--seed", seed, "Master seed");
    auto* o_annuli = app.add_option("--annuli", annuli, "Annulus count k");
    auto* o_nodes = app.add_option("--nodes", nodes, "Sensor count N");
    auto* o_cap = app.add_option("--rounds-cap", rounds_cap, "Round cap");
    auto* o_emit = app.add_option("--emit-every", emit_every, "Metrics decimation in rounds");
    app.add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    auto* o_strategy = app.add_option("--strategy", strategy, "vfem, uniform or wu")
                           ->check(CLI::IsMember({"vfem", "uniform", "wu"}));

    auto* plan = app.add_subcommand("plan", "Annulus plan only");
    auto* deploy = app.add_subcommand("deploy", "Relax and assign roles");
    auto* simulate = app.add_subcommand("simulate", "Full pipeline and round loop");
    auto* compare = app.add_subcommand("compare", "VFEM and both baselines on shared seeds");
    int vfem_nodes = 0, uniform_nodes = 0, wu_nodes = 0;
    auto* o_vn = compare->add_option("--vfem-nodes", vfem_nodes, "Sensor count of the VFEM run");
    auto* o_un = compare->add_option("--uniform-nodes", uniform_nodes, "Sensor count of the uniform run");
    auto* o_wn = compare->add_option("--wu-nodes", wu_nodes, "Sensor count of the wu run");
    compare->add_option("--seeds", opts.seeds, "Consecutive seeds starting at --seed")
        ->check(CLI::PositiveNumber);
    compare->add_option("--workers", opts.workers, "Concurrent runs")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (*o_config) opts.config_path = config_path;
    if (*o_seed) opts.overrides.seed = seed;
    if (*o_annuli) opts.overrides.annuli = annuli;
    if (*o_nodes) opts.overrides.nodes = nodes;
    if (*o_cap) opts.overrides.rounds_cap = rounds_cap;
    if (*o_emit) opts.overrides.emit_every = emit_every;
    if (*o_strategy) opts.overrides.strategy = parse_strategy(strategy);
    if (*o_vn) opts.vfem_nodes = vfem_nodes;
    if (*o_un) opts.uniform_nodes = uniform_nodes;
    if (*o_wn) opts.wu_nodes = wu_nodes;

    try {
        if (*plan) cmd_plan(opts, std::cout);
        if (*deploy) cmd_deploy(opts, std::cout);
        if (*simulate) cmd_simulate(opts, std::cout);
        if (*compare) cmd_compare(opts, std::cout);
    } catch (const StageError& e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what() << '\n';
        return e.stage() == "config" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
