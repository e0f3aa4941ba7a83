/// @file report_io.hpp
/// @brief File formats: Table-1-layout CSVs, full-precision field CSVs,
///        iteration traces and JSON run summaries.
///
/// Field CSV layout: the first line is ",0,1,...,n" (column index i, the x
/// direction); each following line starts with the row index j (the y
/// direction) followed by the n + 1 node values of that row.
#pragma once

#include "perfhom/analysis.hpp"
#include "perfhom/field_core.hpp"
#include "perfhom/strange_term.hpp"

#include <filesystem>
#include <string>

#include "json.hpp"

namespace perfhom::io {

inline constexpr const char* kVersion = "1.0.0";

/// Values with exactly three decimals after half-away-from-zero rounding.
std::string table_csv_rounded(const ScalarField& field);

/// Values with 17 significant digits (round-trips doubles exactly).
std::string field_csv_full(const ScalarField& field);

/// Parses the full-precision (or rounded) field CSV layout.
/// Throws InvalidConfig on malformed input.
ScalarField parse_field_csv(const std::string& text);
ScalarField read_field_csv(const std::filesystem::path& path);

/// "iteration,delta" header, then one row per iteration.
std::string trace_csv(const IterationTrace& trace);

/// Human-readable table for terminals.
std::string table_text(const ScalarField& rounded);

nlohmann::json sweep_json(const SweepResult& result, const SweepConfig& config, bool include_timings);
nlohmann::json table_checks_json(const TableChecks& checks);
nlohmann::json calibration_json(const CalibrationReport& report);
nlohmann::json trace_json(const IterationTrace& trace);

/// Writes to a sibling temporary file, then renames over @p path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

} // namespace perfhom::io
