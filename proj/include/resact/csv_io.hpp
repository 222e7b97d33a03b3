#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "resact/motor_model.hpp"
#include "resact/param_ident.hpp"
#include "resact/thermal_circuit.hpp"

namespace resact::io {

/// Nine significant digits; non-finite values as "inf", "-inf" or "nan".
std::string format_number(double value);

/// Parses a number written by format_number (or any strtod-compatible token).
double parse_number(std::string_view token);

/// Numeric CSV with a header row. Columns are addressed by header name.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    bool has(std::string_view name) const;
    const std::vector<double>& column(std::string_view name) const;
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

CsvTable parse_csv(std::string_view text, const std::string& source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);
std::string to_csv(const CsvTable& table);

std::string read_text(const std::filesystem::path& path);
/// Writes through a sibling temporary file and renames it into place, so a failed
/// write never leaves a partial file behind.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

// time_s,position_rad[,velocity_rad_s,accel_rad_s2]
std::string motion_to_csv(const MotionTrace& trace);
MotionTrace motion_from_csv(const CsvTable& table);

// time_s,voltage_v,current_a
std::string electrical_to_csv(const ElectricalTrace& trace);
ElectricalTrace electrical_from_csv(const CsvTable& table);

// time_s,t_winding_c,t_case_c,q_joule_w,q_bushing_w; empty columns are omitted on
// write and only time_s and t_case_c are required on read.
std::string thermal_to_csv(const ThermalTrace& trace);
ThermalTrace thermal_from_csv(const CsvTable& table);

/// Trace CSV (thermal columns, or temperature_c,resistance_ohm for oven records).
std::string record_csv(const ExperimentRecord& record);
/// Sidecar JSON {kind, speed_rad_s, pulse_current_a, pulse_duration_s, heatsink}.
std::string record_sidecar(const ExperimentRecord& record);

/// Writes `<dir>/<name>.csv` plus the `<dir>/<name>.json` sidecar.
void write_record(const std::filesystem::path& dir, const ExperimentRecord& record);
/// Reads a record from its sidecar path; the trace is the sibling .csv.
ExperimentRecord read_record(const std::filesystem::path& sidecar);
/// All records of a directory, ordered by file name.
std::vector<ExperimentRecord> read_record_dir(const std::filesystem::path& dir);

}  // namespace resact::io
