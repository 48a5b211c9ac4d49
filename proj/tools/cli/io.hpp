#pragma once

#include <filesystem>
#include <string>

#include "config.hpp"
#include "dampwave/solver.hpp"
#include "dampwave/trace.hpp"

namespace dampwave::cli {

struct GccOutcome;

/// Shortest decimal that round-trips; "inf", "-inf", "nan" otherwise.
std::string format_double(double x);

/// A JSON number, or the format_double string when x is not finite.
Json json_number(double x);

/// Writes atomically enough for our purposes; creates parent directories.
/// Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

std::string trace_csv(const EnergyTrace& trace);
/// Parses a trace written by trace_csv. Throws IoError on malformed input.
EnergyTrace parse_trace_csv(const std::string& text);

/// Nodal u and u_t with a one-line JSON header comment.
std::string snapshot_csv(const WaveState& state, std::size_t index);

Json gcc_report_json(const GccOutcome& gcc);
std::string min_average_csv(const GccOutcome& gcc);

std::string sha256_hex(const std::string& data);

/// Run manifest. wall_time is the only field that varies between runs.
Json manifest_json(const ScenarioConfig& config, const std::string& command, double wall_time_s);

std::string dump(const Json& j);

}  // namespace dampwave::cli
