#pragma once

// Record writers. CSV files start with a header row and carry a
// schema_version column; JSON records carry schema_version and a record type.

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vfem/planner.hpp"
#include "vfem/sim.hpp"
#include "vfem/vforce.hpp"

namespace vfem::app {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal that round-trips, locale independent.
std::string format_double(double v);

nlohmann::json plan_record(const AnnulusPlan& plan);
nlohmann::json summary_record(const LifetimeSummary& summary);

void write_positions(std::ostream& out, std::span<const Point> positions);
/// Positions with role and annulus; the base row is included.
void write_network(std::ostream& out, const Network& network);
void write_relax_trace(std::ostream& out, const RelaxationReport& report);
void write_routes(std::ostream& out, const RoutingState& routing);

struct MetricsRun {
    std::string run_id;
    std::string strategy;
    const std::vector<RoundMetrics>* series = nullptr;
};

/// One header for all runs; every run must have `annuli` annuli.
void write_metrics(std::ostream& out, int annuli, std::span<const MetricsRun> runs);

}  // namespace vfem::app
