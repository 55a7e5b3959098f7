#pragma once

// Serialization of traces and reports. Every floating value is written with
// 17 significant digits so that files round-trip exactly.

#include <filesystem>
#include <span>
#include <string>

#include "ifcf/curvature.hpp"
#include "ifcf/diagnostics.hpp"
#include "ifcf/oracle.hpp"
#include "ifcf/trace.hpp"

namespace ifcf {

/// Writes dir/trace.json and dir/snapshots/*.csv (plus snapshots/failure.csv on abort).
/// Throws Io on any filesystem error.
void write_trace(const FlowTrace& trace, const std::filesystem::path& dir);

/// Reads dir/trace.json back (records, trajectories, invariants, status).
/// Snapshots are not loaded. Throws Io if the file is missing or malformed.
FlowTrace read_trace(const std::filesystem::path& dir);

/// Snapshot CSV: a "# {json}" header line, then x1,x2,u,v,k1,k2,F rows.
void write_snapshot_csv(const Snapshot& snapshot, const TraceHeader& header, const std::filesystem::path& path);

void write_oracle_csv(std::span<const HomogeneousSample> samples, const ArwConstants& constants,
                      const std::filesystem::path& path);
void write_transition_csv(const TransitionCurve& curve, const std::filesystem::path& path);
void write_umbilicality_csv(const FlowTrace& trace, const std::filesystem::path& path);

std::string rates_json(const AsymptoticReport& report, const DiagnosticsConfig& config);
std::string c3_json(const C3Report& report);
std::string kstar_json(const KstarCertificate& certificate, const CurvatureFunction& cf);

/// Writes text to path, creating parent directories; throws Io.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ifcf
