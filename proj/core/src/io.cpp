#include "fbsync/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fbsync/error.hpp"

namespace fbsync::io {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

json grid_to_json(const modeops::FrequencyGrid& g) {
  return {{"bin_spacing_hz", g.bin_spacing_hz()},
          {"num_bins", g.num_bins()},
          {"index_offset", g.index_offset()}};
}

modeops::FrequencyGrid grid_from_json(const json& j) {
  return modeops::FrequencyGrid(j.at("bin_spacing_hz").get<double>(), j.at("num_bins").get<int>(),
                                j.at("index_offset").get<int>());
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw IoError("matrix json: expected a nonempty array");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(rows.front().size());
  ComplexMatrix m(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols) {
      throw IoError("matrix json: ragged rows");
    }
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      const auto& pair = row[static_cast<std::size_t>(c)];
      if (!pair.is_array() || pair.size() != 2) throw IoError("matrix json: entries must be [re, im]");
      m(r, c) = Complex(pair[0].get<double>(), pair[1].get<double>());
    }
  }
  return m;
}

template <typename F>
auto parse_json(std::string_view text, const char* what, F&& build) {
  try {
    return build(json::parse(text));
  } catch (const json::exception& e) {
    throw IoError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw IoError("cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw IoError("csv: missing column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.emplace_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size()) {
        throw IoError("csv: row " + std::to_string(table.rows.size() + 1) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw IoError("csv: empty input");
  return table;
}

std::string trace_to_csv(const classical::SpectrumTrace& trace) {
  std::string out = "offset_hz,power_dbm\n";
  for (std::size_t i = 0; i < trace.frequency_offsets_hz.size(); ++i) {
    out += format_double(trace.frequency_offsets_hz[i]) + "," + format_double(trace.powers_dbm[i]) +
           "\n";
  }
  return out;
}

classical::SpectrumTrace trace_from_csv(std::string_view text, double timestamp_s) {
  const auto table = parse_csv(text);
  const auto fcol = table.column("offset_hz");
  const auto pcol = table.column("power_dbm");
  classical::SpectrumTrace trace;
  trace.timestamp_s = timestamp_s;
  for (const auto& row : table.rows) {
    trace.frequency_offsets_hz.push_back(parse_double(row[fcol]));
    trace.powers_dbm.push_back(parse_double(row[pcol]));
  }
  trace.validate();
  return trace;
}

std::string manifest_to_json(std::span<const ManifestEntry> entries) {
  json traces = json::array();
  for (const auto& e : entries) traces.push_back({{"file", e.file}, {"timestamp_s", e.timestamp_s}});
  return json{{"traces", traces}}.dump(2) + "\n";
}

std::vector<ManifestEntry> manifest_from_json(std::string_view text) {
  return parse_json(text, "manifest", [](const json& j) {
    std::vector<ManifestEntry> entries;
    for (const auto& e : j.at("traces")) {
      entries.push_back({e.at("file").get<std::string>(), e.at("timestamp_s").get<double>()});
    }
    if (entries.empty()) throw IoError("manifest: no traces listed");
    return entries;
  });
}

std::vector<classical::SpectrumTrace> read_trace_series(const std::filesystem::path& manifest) {
  const auto entries = manifest_from_json(read_file(manifest));
  const auto base = manifest.parent_path();
  std::vector<classical::SpectrumTrace> traces;
  traces.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::filesystem::path file(entries[i].file);
    if (file.is_relative()) file = base / file;
    try {
      traces.push_back(trace_from_csv(read_file(file), entries[i].timestamp_s));
    } catch (const MalformedTraceError& e) {
      throw MalformedTraceError("trace " + std::to_string(i) + " (" + file.string() + "): " + e.what());
    } catch (const IoError& e) {
      throw IoError("trace " + std::to_string(i) + " (" + file.string() + "): " + e.what());
    }
  }
  return traces;
}

std::string sweep_to_csv(std::span<const classical::SweepRow> rows) {
  std::string out = "tau_s,contrast_dbc\n";
  for (const auto& r : rows) out += format_double(r.tau_s) + "," + format_double(r.contrast_dbc) + "\n";
  return out;
}

std::vector<classical::SweepRow> sweep_from_csv(std::string_view text) {
  const auto table = parse_csv(text);
  const auto tcol = table.column("tau_s");
  const auto ccol = table.column("contrast_dbc");
  std::vector<classical::SweepRow> rows;
  for (const auto& row : table.rows) rows.push_back({parse_double(row[tcol]), parse_double(row[ccol])});
  return rows;
}

std::string drift_to_csv(std::span<const classical::DriftRow> rows) {
  std::string out = "timestamp_s,contrast_dbc,tau_s\n";
  for (const auto& r : rows) {
    out += format_double(r.timestamp_s) + "," + format_double(r.contrast_dbc) + "," +
           format_double(r.tau_s) + "\n";
  }
  return out;
}

std::string jsi_to_csv(const biphoton::JsiGrid& jsi) {
  std::string out = "signal_bin,idler_bin,counts\n";
  const auto& sg = jsi.signal_grid();
  const auto& ig = jsi.idler_grid();
  for (int r = 0; r < sg.num_bins(); ++r) {
    for (int c = 0; c < ig.num_bins(); ++c) {
      out += std::to_string(sg.absolute_index(r)) + "," + std::to_string(ig.absolute_index(c)) + "," +
             format_double(jsi.counts()(r, c)) + "\n";
    }
  }
  return out;
}

biphoton::JsiGrid jsi_from_csv(std::string_view text, double bin_spacing_hz, double bin_width_hz,
                               double integration_s) {
  const auto table = parse_csv(text);
  const auto scol = table.column("signal_bin");
  const auto icol = table.column("idler_bin");
  const auto ccol = table.column("counts");
  if (table.rows.empty()) throw IoError("jsi csv: no rows");

  std::map<std::pair<int, int>, double> cells;
  int s_lo = 0, s_hi = 0, i_lo = 0, i_hi = 0;
  bool first = true;
  for (const auto& row : table.rows) {
    const double sv = parse_double(row[scol]);
    const double iv = parse_double(row[icol]);
    if (sv != std::floor(sv) || iv != std::floor(iv)) throw IoError("jsi csv: bin labels must be integers");
    const int s = static_cast<int>(sv);
    const int i = static_cast<int>(iv);
    if (!cells.emplace(std::pair{s, i}, parse_double(row[ccol])).second) {
      throw IoError("jsi csv: duplicate bin pair");
    }
    if (first) {
      s_lo = s_hi = s;
      i_lo = i_hi = i;
      first = false;
    }
    s_lo = std::min(s_lo, s);
    s_hi = std::max(s_hi, s);
    i_lo = std::min(i_lo, i);
    i_hi = std::max(i_hi, i);
  }
  const int rows = s_hi - s_lo + 1;
  const int cols = i_hi - i_lo + 1;
  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != cells.size()) {
    throw IoError("jsi csv: bin pairs do not form a complete rectangular scan");
  }
  Eigen::MatrixXd counts(rows, cols);
  for (const auto& [key, value] : cells) counts(key.first - s_lo, key.second - i_lo) = value;
  return biphoton::JsiGrid(std::move(counts), modeops::FrequencyGrid(bin_spacing_hz, rows, s_lo),
                           modeops::FrequencyGrid(bin_spacing_hz, cols, i_lo), bin_width_hz,
                           integration_s);
}

std::string to_json(const modeops::ModeTransform& transform) {
  const json j{{"in_grid", grid_to_json(transform.in_grid())},
               {"out_grid", grid_to_json(transform.out_grid())},
               {"matrix", matrix_to_json(transform.matrix())}};
  return j.dump();
}

modeops::ModeTransform mode_transform_from_json(std::string_view text) {
  return parse_json(text, "mode transform", [](const json& j) {
    return modeops::ModeTransform(matrix_from_json(j.at("matrix")), grid_from_json(j.at("in_grid")),
                                  grid_from_json(j.at("out_grid")));
  });
}

std::string to_json(const qfp::DensityMatrix& rho) {
  const json j{{"dim", rho.dim()}, {"entries", matrix_to_json(rho.entries())}};
  return j.dump();
}

qfp::DensityMatrix density_matrix_from_json(std::string_view text) {
  return parse_json(text, "density matrix", [](const json& j) {
    auto m = matrix_from_json(j.at("entries"));
    if (j.contains("dim") && j.at("dim").get<int>() != m.rows()) {
      throw IoError("density matrix json: dim does not match entries");
    }
    return qfp::DensityMatrix(std::move(m));
  });
}

}  // namespace fbsync::io
