#pragma once

// File formats. Numbers are written with 17 significant digits so doubles
// round-trip exactly.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fbsync/biphoton.hpp"
#include "fbsync/classical.hpp"
#include "fbsync/modeops.hpp"
#include "fbsync/qfp.hpp"

namespace fbsync::io {

std::string format_double(double value);
double parse_double(std::string_view text);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by name; throws IoError if absent.
  std::size_t column(std::string_view name) const;
};

/// Comma-separated text with a header line; blank lines are skipped.
CsvTable parse_csv(std::string_view text);

// Spectrum traces: header `offset_hz,power_dbm`.
std::string trace_to_csv(const classical::SpectrumTrace& trace);
classical::SpectrumTrace trace_from_csv(std::string_view text, double timestamp_s);

struct ManifestEntry {
  std::string file;  // relative to the manifest's directory unless absolute
  double timestamp_s;
};

/// {"traces": [{"file": ..., "timestamp_s": ...}, ...]}
std::string manifest_to_json(std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> manifest_from_json(std::string_view text);
std::vector<classical::SpectrumTrace> read_trace_series(const std::filesystem::path& manifest);

// `tau_s,contrast_dbc`
std::string sweep_to_csv(std::span<const classical::SweepRow> rows);
std::vector<classical::SweepRow> sweep_from_csv(std::string_view text);
// `timestamp_s,contrast_dbc,tau_s`
std::string drift_to_csv(std::span<const classical::DriftRow> rows);

// `signal_bin,idler_bin,counts` with absolute bin indices, row-major.
std::string jsi_to_csv(const biphoton::JsiGrid& jsi);
biphoton::JsiGrid jsi_from_csv(std::string_view text, double bin_spacing_hz = 19e9,
                               double bin_width_hz = 12e9, double integration_s = 2.0);

/// Grid metadata and row-major [re, im] pairs.
std::string to_json(const modeops::ModeTransform& transform);
modeops::ModeTransform mode_transform_from_json(std::string_view text);

/// {"dim": d, "entries": [[[re, im], ...], ...]}
std::string to_json(const qfp::DensityMatrix& rho);
qfp::DensityMatrix density_matrix_from_json(std::string_view text);

}  // namespace fbsync::io
