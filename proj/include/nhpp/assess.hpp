#ifndef NHPP_ASSESS_HPP
#define NHPP_ASSESS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nhpp/geo.hpp"
#include "nhpp/sampler.hpp"

namespace nhpp {

// Fraction of item pairs on which the two partitions agree.
double rand_index(std::span<const int> z1, std::span<const int> z2);

// Mean absolute deviation between count-scale intensity and observed counts.
double mae(std::span<const double> estimated, const GridCounts& counts);

struct LpmlResult {
  double lpml = 0.0;
  std::vector<double> per_point_cpo;  // log CPO contribution per event
};

// Monte Carlo LPML: sum_j log(harmonic-mean point intensity at s_j) minus the
// integral of the mean intensity surface. Cell intensities are count-scale;
// the point-level surface divides by cell area.
LpmlResult lpml(const PointPattern& points, const PosteriorDraws& draws,
                const GridCounts& grid);

struct MetricsReport {
  double mae = 0.0;
  std::optional<double> lpml;
  std::optional<double> rand_index;
  std::vector<double> per_point_cpo;
};

std::string metrics_to_json(const MetricsReport& report);
void write_metrics_json_file(const MetricsReport& report, const std::string& path);
void write_cpo_csv_file(const std::vector<double>& cpo, const std::string& path);

}  // namespace nhpp

#endif
