#include "nhpp/geo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "nhpp/errors.hpp"

namespace nhpp {

long long GridCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0LL);
}

namespace {

// Split one CSV record, honoring double-quoted fields (USGS `place` contains
// commas). Assumes records do not span physical lines, which holds for USGS
// exports.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

ParseReport parse_usgs_csv(std::istream& in, const CsvColumnMap& columns) {
  ParseReport report;
  std::string line;
  if (!std::getline(in, line)) return report;  // empty file: empty list

  auto header = split_csv_line(line);
  auto find_col = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  int lon_col = find_col(columns.longitude);
  int lat_col = find_col(columns.latitude);
  if (lon_col < 0 || lat_col < 0)
    throw validation_error("CSV header is missing required columns '" +
                           columns.longitude + "'/'" + columns.latitude + "'");
  int mag_col = find_col(columns.magnitude);
  int time_col = find_col(columns.timestamp);

  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    auto field_at = [&](int col) -> std::string {
      return (col >= 0 && col < static_cast<int>(fields.size())) ? fields[col] : "";
    };
    auto lon = parse_double(field_at(lon_col));
    auto lat = parse_double(field_at(lat_col));
    if (!lon || !lat) {
      report.skipped.push_back({line_number, "unparseable coordinates"});
      continue;
    }
    if (*lon < -180.0 || *lon > 180.0 || *lat < -90.0 || *lat > 90.0) {
      report.skipped.push_back({line_number, "coordinates out of range"});
      continue;
    }
    RawEvent ev;
    ev.longitude = *lon;
    ev.latitude = *lat;
    ev.magnitude = parse_double(field_at(mag_col));
    if (time_col >= 0 && !field_at(time_col).empty()) ev.timestamp = field_at(time_col);
    report.events.push_back(std::move(ev));
  }
  return report;
}

ParseReport parse_usgs_csv_file(const std::string& path, const CsvColumnMap& columns) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open CSV file: " + path);
  return parse_usgs_csv(in, columns);
}

PointPattern to_unit_square(const std::vector<RawEvent>& events, FrameMode mode) {
  PointPattern pattern;
  if (mode == FrameMode::BoundingBox && !events.empty()) {
    double lon_min = events[0].longitude, lon_max = events[0].longitude;
    double lat_min = events[0].latitude, lat_max = events[0].latitude;
    for (const auto& ev : events) {
      lon_min = std::min(lon_min, ev.longitude);
      lon_max = std::max(lon_max, ev.longitude);
      lat_min = std::min(lat_min, ev.latitude);
      lat_max = std::max(lat_max, ev.latitude);
    }
    // Degenerate extent: fall back to a unit-wide window centered on the data.
    double lon_span = lon_max > lon_min ? lon_max - lon_min : 1.0;
    double lat_span = lat_max > lat_min ? lat_max - lat_min : 1.0;
    if (lon_max == lon_min) lon_min -= 0.5;
    if (lat_max == lat_min) lat_min -= 0.5;
    pattern.source_frame = {lon_min, 1.0 / lon_span, lat_min, 1.0 / lat_span};
  }
  pattern.points.reserve(events.size());
  for (const auto& ev : events) {
    auto [x, y] = pattern.source_frame.forward(ev.longitude, ev.latitude);
    pattern.points.emplace_back(std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0));
  }
  return pattern;
}

GridCounts bin_counts(const PointPattern& pattern, int resolution) {
  if (resolution < 1) throw validation_error("resolution must be >= 1");
  GridCounts grid;
  grid.resolution = resolution;
  grid.counts.assign(static_cast<std::size_t>(resolution) * resolution, 0);
  for (const auto& [x, y] : pattern.points) {
    int col = std::min(static_cast<int>(x * resolution), resolution - 1);
    int row = std::min(static_cast<int>(y * resolution), resolution - 1);
    ++grid.counts[static_cast<std::size_t>(row) * resolution + col];
  }
  return grid;
}

void write_grid_csv(const GridCounts& grid, std::ostream& out) {
  out << "resolution," << grid.resolution << "\n";
  int r = grid.resolution;
  for (int row = 0; row < r; ++row) {
    for (int col = 0; col < r; ++col) {
      if (col) out << ',';
      out << grid.counts[static_cast<std::size_t>(row) * r + col];
    }
    out << "\n";
  }
}

void write_grid_csv_file(const GridCounts& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write grid CSV: " + path);
  write_grid_csv(grid, out);
}

GridCounts read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw validation_error("grid CSV is empty");
  auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "resolution")
    throw validation_error("grid CSV must start with 'resolution,r'");
  int r = 0;
  auto [ptr, ec] = std::from_chars(header[1].data(), header[1].data() + header[1].size(), r);
  if (ec != std::errc() || r < 1) throw validation_error("invalid grid resolution");

  GridCounts grid;
  grid.resolution = r;
  grid.counts.reserve(static_cast<std::size_t>(r) * r);
  for (int row = 0; row < r; ++row) {
    if (!std::getline(in, line)) throw validation_error("grid CSV truncated");
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != r)
      throw validation_error("grid CSV row has wrong width");
    for (const auto& f : fields) {
      long long v = 0;
      auto [p, e] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (e != std::errc() || p != f.data() + f.size() || v < 0)
        throw validation_error("grid CSV cell is not a nonnegative integer");
      grid.counts.push_back(v);
    }
  }
  return grid;
}

GridCounts read_grid_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open grid CSV: " + path);
  return read_grid_csv(in);
}

void write_points_csv_file(const PointPattern& pattern, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write points CSV: " + path);
  out << "x,y\n";
  out.precision(17);
  for (const auto& [x, y] : pattern.points) out << x << ',' << y << "\n";
}

PointPattern read_points_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open points CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw validation_error("points CSV is empty");
  PointPattern pattern;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() < 2)
      throw validation_error("points CSV line " + std::to_string(line_number) +
                             " needs x,y");
    auto x = parse_double(fields[0]);
    auto y = parse_double(fields[1]);
    if (!x || !y || *x < 0.0 || *x > 1.0 || *y < 0.0 || *y > 1.0)
      throw validation_error("points CSV line " + std::to_string(line_number) +
                             " is outside the unit square");
    pattern.points.emplace_back(*x, *y);
  }
  return pattern;
}

}  // namespace nhpp
