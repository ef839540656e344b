#ifndef NHPP_GEO_HPP
#define NHPP_GEO_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nhpp {

struct RawEvent {
  double longitude = 0.0;  // degrees, [-180, 180]
  double latitude = 0.0;   // degrees, [-90, 90]
  std::optional<double> magnitude;
  std::optional<std::string> timestamp;
};

// Affine map lon/lat -> unit square: x = (lon - lon_offset) * lon_scale, etc.
struct FrameTransform {
  double lon_offset = -180.0;
  double lon_scale = 1.0 / 360.0;
  double lat_offset = -90.0;
  double lat_scale = 1.0 / 180.0;

  std::pair<double, double> forward(double lon, double lat) const {
    return {(lon - lon_offset) * lon_scale, (lat - lat_offset) * lat_scale};
  }
  std::pair<double, double> inverse(double x, double y) const {
    return {x / lon_scale + lon_offset, y / lat_scale + lat_offset};
  }
};

struct PointPattern {
  std::vector<std::pair<double, double>> points;  // (x, y) in [0,1]^2
  FrameTransform source_frame;

  std::size_t count() const { return points.size(); }
};

// Row-major r x r grid of event counts over the unit square.
struct GridCounts {
  int resolution = 0;
  std::vector<long long> counts;  // length resolution^2, cell (row,col) -> row*r+col

  std::size_t cell_count() const { return counts.size(); }
  double cell_area() const { return 1.0 / static_cast<double>(counts.size()); }
  long long total() const;
};

struct CsvColumnMap {
  std::string longitude = "longitude";
  std::string latitude = "latitude";
  std::string magnitude = "mag";
  std::string timestamp = "time";
};

struct SkippedRow {
  std::size_t line_number;  // 1-based, header is line 1
  std::string reason;
};

struct ParseReport {
  std::vector<RawEvent> events;
  std::vector<SkippedRow> skipped;
};

// Header-driven CSV parse (RFC-4180 quoting). Rows with missing or
// out-of-range coordinates are reported in `skipped`, never fatal.
// Missing mandatory columns throw validation_error.
ParseReport parse_usgs_csv(std::istream& in, const CsvColumnMap& columns = {});
ParseReport parse_usgs_csv_file(const std::string& path, const CsvColumnMap& columns = {});

enum class FrameMode { Global, BoundingBox };

// Map events to the unit square. Global frame: x = (lon+180)/360, y = (lat+90)/180.
PointPattern to_unit_square(const std::vector<RawEvent>& events,
                            FrameMode mode = FrameMode::Global);

// Bin unit-square points into an r x r grid. Coordinates equal to 1.0 are
// clamped into the last cell so every point lands in exactly one cell.
GridCounts bin_counts(const PointPattern& pattern, int resolution);

// Grid CSV format: first line "resolution,r", then r rows of r integers.
void write_grid_csv(const GridCounts& grid, std::ostream& out);
void write_grid_csv_file(const GridCounts& grid, const std::string& path);
GridCounts read_grid_csv(std::istream& in);
GridCounts read_grid_csv_file(const std::string& path);

// Unit-square points as CSV with an "x,y" header.
void write_points_csv_file(const PointPattern& pattern, const std::string& path);
PointPattern read_points_csv_file(const std::string& path);

}  // namespace nhpp

#endif
