#include "vfem/app/report.hpp"

#include <charconv>
#include <stdexcept>

namespace vfem::app {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json plan_record(const AnnulusPlan& plan) {
    json annuli = json::array();
    for (const AnnulusRow& row : plan.annuli) {
        annuli.push_back({
            {"index", row.index},
            {"sensing_count", row.sensing_count},
            {"relay_count", row.relay_count},
            {"expected_hop", row.expected_hop},
            {"influence_width", row.influence_width},
            {"radius", row.radius},
            {"sensing_angles", row.sensing_angles},
            {"relay_angles", row.relay_angles},
        });
    }
    return json{
        {"schema_version", kSchemaVersion},
        {"record", "plan"},
        {"k", plan.k},
        {"radius", plan.radius},
        {"width", plan.width},
        {"node_count", plan.node_count},
        {"slot_phase", plan.slot_phase},
        {"inner_relay_formula", plan.inner_relay_formula},
        {"warnings", plan.warnings},
        {"annuli", annuli},
    };
}

json summary_record(const LifetimeSummary& s) {
    return json{
        {"schema_version", kSchemaVersion},
        {"record", "summary"},
        {"strategy", s.strategy},
        {"planned_streams", s.planned_streams},
        {"first_death_round", s.first_death_round ? json(*s.first_death_round) : json(nullptr)},
        {"lifetime", s.lifetime},
        {"truncated", s.truncated},
        {"final_annulus_percent", s.final_annulus_percent},
        {"final_annulus_mean_residual", s.final_annulus_mean_residual},
        {"annulus_population", s.annulus_population},
        {"final_total_percent", s.final_total_percent},
    };
}

void write_positions(std::ostream& out, std::span<const Point> positions) {
    out << "schema_version,id,x,y\n";
    for (std::size_t i = 0; i < positions.size(); ++i) {
        out << kSchemaVersion << ',' << i + 1 << ',' << format_double(positions[i].x) << ','
            << format_double(positions[i].y) << '\n';
    }
}

void write_network(std::ostream& out, const Network& network) {
    out << "schema_version,id,x,y,role,annulus\n";
    for (const Node& n : network) {
        out << kSchemaVersion << ',' << n.id << ',' << format_double(n.position.x) << ','
            << format_double(n.position.y) << ',' << to_string(n.role) << ',' << n.annulus << '\n';
    }
}

void write_relax_trace(std::ostream& out, const RelaxationReport& report) {
    out << "schema_version,iteration,max_displacement\n";
    for (std::size_t i = 0; i < report.max_displacement_trace.size(); ++i) {
        out << kSchemaVersion << ',' << i + 1 << ',' << format_double(report.max_displacement_trace[i])
            << '\n';
    }
}

void write_routes(std::ostream& out, const RoutingState& routing) {
    out << "schema_version,owner,routable,relays,weight,length\n";
    for (const auto& [owner, route] : routing.routes) {
        out << kSchemaVersion << ',' << owner << ',' << (route.routable ? 1 : 0) << ',';
        for (std::size_t i = 0; i < route.path.relays.size(); ++i) {
            if (i) out << ';';
            out << route.path.relays[i];
        }
        out << ',' << format_double(route.path.weight) << ',' << format_double(route.path.length) << '\n';
    }
}

void write_metrics(std::ostream& out, int annuli, std::span<const MetricsRun> runs) {
    out << "schema_version,run_id,strategy,round,delivered,alive_sensing,alive_relay,deaths,charged_j,"
           "total_residual_j";
    for (int m = 0; m < annuli; ++m) out << ",c" << m << "_residual_j";
    for (int m = 0; m < annuli; ++m) out << ",c" << m << "_percent";
    out << '\n';
    for (const MetricsRun& run : runs) {
        for (const RoundMetrics& r : *run.series) {
            if (static_cast<int>(r.annulus_residual.size()) != annuli) {
                throw std::invalid_argument("write_metrics: annulus count mismatch in run " + run.run_id);
            }
            out << kSchemaVersion << ',' << run.run_id << ',' << run.strategy << ',' << r.round << ','
                << r.delivered << ',' << r.alive_sensing << ',' << r.alive_relay << ',' << r.deaths.size()
                << ',' << format_double(r.charged) << ',' << format_double(r.total_residual);
            for (double v : r.annulus_residual) out << ',' << format_double(v);
            for (double v : r.annulus_percent) out << ',' << format_double(v);
            out << '\n';
        }
    }
}

}  // namespace vfem::app
