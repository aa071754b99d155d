#include "vfem/app/pipeline.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <thread>
#include <vector>

#include "vfem/app/report.hpp"
#include "vfem/planner.hpp"
#include "vfem/rng.hpp"
#include "vfem/routing.hpp"
#include "vfem/sim.hpp"

namespace vfem::app {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <typename F>
auto in_stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        in_stage("output", [&] {
            fs::create_directories(dir_);
            return 0;
        });
    }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        in_stage("output", [&] {
            std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
            body(out);
            if (!out) throw std::runtime_error("write failed for " + (dir_ / name).string());
            written_.push_back(name);
            return 0;
        });
    }

    void write_json(const std::string& name, const json& record) {
        write(name, [&](std::ostream& out) { out << record.dump(2) << '\n'; });
    }

    const std::vector<std::string>& written() const { return written_; }
    const fs::path& path() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

json relaxation_record(const RelaxationReport& r) {
    return json{{"iterations_used", r.iterations_used},
                {"final_max_displacement", r.final_max_displacement},
                {"converged", r.converged}};
}

json plan_counts(const AnnulusPlan& plan) {
    std::vector<int> sensing, relay;
    for (const auto& row : plan.annuli) {
        sensing.push_back(row.sensing_count);
        relay.push_back(row.relay_count);
    }
    return json{{"k", plan.k}, {"sensing_counts", sensing}, {"relay_counts", relay},
                {"inner_relay_formula", plan.inner_relay_formula}};
}

json assignment_record(const RoleAssignment& a) {
    return json{{"mean_displacement", a.mean_displacement},
                {"max_displacement", a.max_displacement},
                {"rebalanced", a.rebalanced}};
}

json manifest_record(const std::string& command, const ResolvedRun& run, json stages,
                     const std::vector<std::string>& outputs) {
    const NetworkConfig& n = run.network;
    std::vector<std::string> files = outputs;
    files.push_back("manifest.json");
    return json{
        {"schema_version", kSchemaVersion},
        {"record", "manifest"},
        {"tool_version", kToolVersion},
        {"command", command},
        {"strategy", to_string(run.strategy)},
        {"seed", n.rng_seed},
        {"config", config_to_json(run.requested)},
        {"resolved",
         {{"lattice", n.lattice()},
          {"d0", n.force.d0},
          {"delta_l", n.force.delta_l},
          {"friction_bound", n.force.friction_bound(n.lattice())}}},
        {"stages", std::move(stages)},
        {"outputs", files},
    };
}

Deployment run_deploy(const NetworkConfig& config) {
    Deployment d;
    d.initial = in_stage("deploy", [&] {
        Rng rng(config.rng_seed, Stream::Deployment);
        return uniform_disk(rng, config.node_count, config.radius);
    });
    d.relaxation = in_stage("relax", [&] { return relax(d.initial, config); });
    d.plan = in_stage("plan", [&] { return make_plan(config); });
    d.assignment = in_stage("assign", [&] { return assign_roles(d.relaxation.positions, d.plan); });
    d.network = build_network(d.assignment, config.initial_energy);
    return d;
}

BaselineKind baseline_of(Strategy s) {
    return s == Strategy::Uniform ? BaselineKind::UniformDirect : BaselineKind::WuGeometric;
}

void log_summary(std::ostream& log, const std::string& label, const LifetimeSummary& s) {
    log << label << ": lifetime " << s.lifetime << (s.truncated ? " (truncated)" : "") << ", first death "
        << (s.first_death_round ? std::to_string(*s.first_death_round) : std::string("none")) << '\n';
}

struct Job {
    std::string run_id;
    Strategy strategy = Strategy::Vfem;
    NetworkConfig config;
    SimulationResult result;
    std::exception_ptr error;
};

void run_jobs(std::vector<Job>& jobs, const SimOptions& sim, int workers) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            Job& job = jobs[i];
            try {
                if (job.strategy == Strategy::Vfem) {
                    Deployment d = run_deploy(job.config);
                    job.result = in_stage("simulate", [&] {
                        return simulate(std::move(d.network), d.plan, job.config, sim);
                    });
                } else {
                    job.result = in_stage("baseline", [&] {
                        return run_baseline(baseline_of(job.strategy), job.config, sim);
                    });
                }
            } catch (...) {
                job.error = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const Job& job : jobs) {
        if (job.error) std::rethrow_exception(job.error);
    }
}

}  // namespace

const char* to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::Vfem: return "vfem";
        case Strategy::Uniform: return "uniform";
        case Strategy::Wu: return "wu";
    }
    return "?";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "vfem") return Strategy::Vfem;
    if (name == "uniform") return Strategy::Uniform;
    if (name == "wu") return Strategy::Wu;
    throw ConfigError("strategy", "expected vfem, uniform or wu, got '" + std::string(name) + "'");
}

ResolvedRun resolve(const CommandOptions& options) {
    return in_stage("config", [&] {
        ResolvedRun run;
        run.requested = options.config_path ? load_config(*options.config_path) : default_run_config();
        const Overrides& o = options.overrides;
        RunConfig& r = run.requested;
        if (o.seed) r.network.rng_seed = *o.seed;
        if (o.annuli) r.network.annulus_count = *o.annuli;
        if (o.nodes) r.network.node_count = *o.nodes;
        if (o.rounds_cap) r.sim.rounds_cap = *o.rounds_cap;
        if (o.emit_every) r.sim.emit_every = *o.emit_every;
        if (r.sim.rounds_cap < 1) throw ConfigError("rounds_cap", "must be >= 1");
        if (r.sim.emit_every < 1) throw ConfigError("emit_every", "must be >= 1");
        run.strategy = o.strategy ? *o.strategy : parse_strategy(r.strategy.value_or("vfem"));
        r.strategy = to_string(run.strategy);
        run.network = finalize(r.network);
        return run;
    });
}

void cmd_plan(const CommandOptions& options, std::ostream& log) {
    const ResolvedRun run = resolve(options);
    const AnnulusPlan plan = in_stage("plan", [&] { return make_plan(run.network); });
    OutputDir out(options.out_dir);
    out.write_json("plan.json", plan_record(plan));
    out.write_json("manifest.json",
                   manifest_record("plan", run, json{{"plan", plan_counts(plan)}}, out.written()));
    for (const auto& row : plan.annuli) {
        log << "C" << row.index << ": sensing " << row.sensing_count << ", relay " << row.relay_count
            << ", hop " << format_double(row.expected_hop) << " m\n";
    }
    for (const auto& w : plan.warnings) log << "warning: " << w << '\n';
}

void cmd_deploy(const CommandOptions& options, std::ostream& log) {
    const ResolvedRun run = resolve(options);
    const Deployment d = run_deploy(run.network);
    OutputDir out(options.out_dir);
    out.write_json("plan.json", plan_record(d.plan));
    out.write("positions_before.csv", [&](std::ostream& s) { write_positions(s, d.initial); });
    out.write("positions_after.csv", [&](std::ostream& s) { write_network(s, d.network); });
    out.write("relax_trace.csv", [&](std::ostream& s) { write_relax_trace(s, d.relaxation.report); });
    json stages{{"relaxation", relaxation_record(d.relaxation.report)},
                {"plan", plan_counts(d.plan)},
                {"assignment", assignment_record(d.assignment)}};
    out.write_json("manifest.json", manifest_record("deploy", run, std::move(stages), out.written()));
    log << "relaxation: " << d.relaxation.report.iterations_used << " iterations, "
        << (d.relaxation.report.converged ? "converged" : "not converged") << '\n';
}

void cmd_simulate(const CommandOptions& options, std::ostream& log) {
    const ResolvedRun run = resolve(options);
    const SimOptions& sim = run.requested.sim;
    OutputDir out(options.out_dir);
    json stages = json::object();
    SimulationResult result;

    if (run.strategy == Strategy::Vfem) {
        Deployment d = run_deploy(run.network);
        out.write_json("plan.json", plan_record(d.plan));
        out.write("positions_before.csv", [&](std::ostream& s) { write_positions(s, d.initial); });
        out.write("positions_after.csv", [&](std::ostream& s) { write_network(s, d.network); });
        out.write("relax_trace.csv", [&](std::ostream& s) { write_relax_trace(s, d.relaxation.report); });
        const RoutingState routing = in_stage("route", [&] { return select_paths(d.network, d.plan); });
        out.write("routes.csv", [&](std::ostream& s) { write_routes(s, routing); });
        stages = {{"relaxation", relaxation_record(d.relaxation.report)},
                  {"plan", plan_counts(d.plan)},
                  {"assignment", assignment_record(d.assignment)}};
        result = in_stage("simulate", [&] { return simulate(d.network, d.plan, run.network, sim); });
    } else {
        const BaselineKind kind = baseline_of(run.strategy);
        const Network layout = in_stage("baseline", [&] { return baseline_network(kind, run.network); });
        out.write("positions_after.csv", [&](std::ostream& s) { write_network(s, layout); });
        result = in_stage("baseline", [&] { return run_baseline(kind, run.network, sim); });
    }

    const MetricsRun metrics{"0", to_string(run.strategy), &result.series};
    out.write("metrics.csv", [&](std::ostream& s) {
        write_metrics(s, run.network.annulus_count, std::span(&metrics, 1));
    });
    json summary = summary_record(result.summary);
    summary["seed"] = run.network.rng_seed;
    summary["node_count"] = run.network.node_count;
    out.write_json("summary.json", summary);
    stages["summary"] = {{"lifetime", result.summary.lifetime}, {"truncated", result.summary.truncated}};
    out.write_json("manifest.json", manifest_record("simulate", run, std::move(stages), out.written()));
    log_summary(log, to_string(run.strategy), result.summary);
}

void cmd_compare(const CommandOptions& options, std::ostream& log) {
    const ResolvedRun run = resolve(options);
    if (options.seeds < 1) throw StageError("config", "seeds: must be >= 1");
    if (options.workers < 1) throw StageError("config", "workers: must be >= 1");

    std::vector<Job> jobs;
    for (int s = 0; s < options.seeds; ++s) {
        const std::uint64_t seed = run.network.rng_seed + static_cast<std::uint64_t>(s);
        for (Strategy strategy : {Strategy::Vfem, Strategy::Uniform, Strategy::Wu}) {
            std::optional<int> nodes = strategy == Strategy::Vfem      ? options.vfem_nodes
                                       : strategy == Strategy::Uniform ? options.uniform_nodes
                                                                       : options.wu_nodes;
            Job job;
            job.strategy = strategy;
            job.run_id = std::string(to_string(strategy)) + "-s" + std::to_string(seed);
            NetworkConfig c = run.requested.network;
            c.rng_seed = seed;
            if (nodes) c.node_count = *nodes;
            if (strategy == Strategy::Vfem) {
                job.config = in_stage("config", [&] { return finalize(c); });
            } else {
                // Baselines never relax, so the force block is carried along untouched.
                c.force = run.network.force;
                job.config = c;
            }
            jobs.push_back(std::move(job));
        }
    }
    run_jobs(jobs, run.requested.sim, options.workers);

    OutputDir out(options.out_dir);
    std::vector<MetricsRun> metrics;
    json runs = json::array();
    for (const Job& job : jobs) {
        metrics.push_back({job.run_id, to_string(job.strategy), &job.result.series});
        json summary = summary_record(job.result.summary);
        summary["run_id"] = job.run_id;
        summary["seed"] = job.config.rng_seed;
        summary["node_count"] = job.config.node_count;
        runs.push_back(std::move(summary));
        log_summary(log, job.run_id, job.result.summary);
    }
    out.write("metrics.csv", [&](std::ostream& s) {
        write_metrics(s, run.network.annulus_count, metrics);
    });
    out.write("compare.csv", [&](std::ostream& s) {
        s << "schema_version,run_id,strategy,seed,nodes,lifetime,first_death_round,truncated";
        for (int m = 0; m < run.network.annulus_count; ++m) s << ",c" << m << "_mean_residual_j";
        s << '\n';
        for (const Job& job : jobs) {
            const LifetimeSummary& r = job.result.summary;
            s << kSchemaVersion << ',' << job.run_id << ',' << to_string(job.strategy) << ','
              << job.config.rng_seed << ',' << job.config.node_count << ',' << r.lifetime << ','
              << (r.first_death_round ? std::to_string(*r.first_death_round) : std::string()) << ','
              << (r.truncated ? 1 : 0);
            for (double v : r.final_annulus_mean_residual) s << ',' << format_double(v);
            s << '\n';
        }
    });

    const int wu_n = options.wu_nodes.value_or(run.network.node_count);
    json record{{"schema_version", kSchemaVersion},
                {"record", "comparison"},
                {"seeds", options.seeds},
                {"wu_populations", wu_populations(run.network.annulus_count, wu_n)},
                {"runs", std::move(runs)}};
    if (run.network.annulus_count == 6) {
        record["wu_reference_populations"] = {648, 216, 72, 24, 8, 4};
    }
    out.write_json("summary.json", record);
    json stages{{"runs", jobs.size()},
                {"seeds", options.seeds},
                {"vfem_nodes", options.vfem_nodes.value_or(run.network.node_count)},
                {"uniform_nodes", options.uniform_nodes.value_or(run.network.node_count)},
                {"wu_nodes", wu_n}};
    out.write_json("manifest.json", manifest_record("compare", run, std::move(stages), out.written()));
}

}  // namespace vfem::app
