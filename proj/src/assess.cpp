#include "nhpp/assess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "nhpp/errors.hpp"

namespace nhpp {

double rand_index(std::span<const int> z1, std::span<const int> z2) {
  if (z1.size() != z2.size()) throw validation_error("partitions have different lengths");
  std::size_t n = z1.size();
  if (n < 2) throw validation_error("rand index needs n >= 2");
  // Concordant pairs via contingency counts: a = sum C(n_ij,2),
  // pairs same in z1 = sum C(row,2), same in z2 = sum C(col,2).
  auto relabel = [](std::span<const int> z) {
    std::vector<int> out(z.size());
    std::vector<int> seen;
    for (std::size_t i = 0; i < z.size(); ++i) {
      auto it = std::find(seen.begin(), seen.end(), z[i]);
      if (it == seen.end()) {
        seen.push_back(z[i]);
        out[i] = static_cast<int>(seen.size()) - 1;
      } else {
        out[i] = static_cast<int>(it - seen.begin());
      }
    }
    return out;
  };
  auto a1 = relabel(z1);
  auto a2 = relabel(z2);
  int k1 = *std::max_element(a1.begin(), a1.end()) + 1;
  int k2 = *std::max_element(a2.begin(), a2.end()) + 1;
  std::vector<long long> table(static_cast<std::size_t>(k1) * k2, 0);
  std::vector<long long> rows(k1, 0), cols(k2, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++table[static_cast<std::size_t>(a1[i]) * k2 + a2[i]];
    ++rows[a1[i]];
    ++cols[a2[i]];
  }
  auto choose2 = [](long long m) { return m * (m - 1) / 2; };
  long long same_both = 0, same1 = 0, same2 = 0;
  for (long long v : table) same_both += choose2(v);
  for (long long v : rows) same1 += choose2(v);
  for (long long v : cols) same2 += choose2(v);
  long long total = choose2(static_cast<long long>(n));
  long long diff_both = total - same1 - same2 + same_both;
  return static_cast<double>(same_both + diff_both) / static_cast<double>(total);
}

double mae(std::span<const double> estimated, const GridCounts& counts) {
  if (estimated.size() != counts.cell_count())
    throw validation_error("intensity vector does not match the grid");
  double sum = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i)
    sum += std::abs(estimated[i] - static_cast<double>(counts.counts[i]));
  return sum / static_cast<double>(estimated.size());
}

LpmlResult lpml(const PointPattern& points, const PosteriorDraws& draws,
                const GridCounts& grid) {
  if (draws.draws.empty()) throw validation_error("no stored draws");
  if (draws.n_cells != grid.cell_count())
    throw validation_error("draws were fitted on a different grid");
  std::size_t n = grid.cell_count();
  double cell_area = grid.cell_area();
  std::size_t num_draws = draws.draws.size();

  // Per cell: mean lambda (integral term) and mean of 1/lambda (harmonic).
  std::vector<double> mean_lambda(n, 0.0), mean_inv_lambda(n, 0.0);
  for (const auto& draw : draws.draws) {
    for (std::size_t i = 0; i < n; ++i) {
      double l = draw.lambdas[draw.labels[i]];
      if (!(l > 0.0)) throw numeric_error("nonpositive intensity in a draw");
      mean_lambda[i] += l;
      mean_inv_lambda[i] += 1.0 / l;
    }
  }
  double integral = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_lambda[i] /= static_cast<double>(num_draws);
    mean_inv_lambda[i] /= static_cast<double>(num_draws);
    integral += mean_lambda[i];  // count-scale cell means sum to the integral
  }

  LpmlResult result;
  result.per_point_cpo.reserve(points.count());
  double log_sum = 0.0;
  double integral_share = points.count() ? integral / static_cast<double>(points.count()) : 0.0;
  int r = grid.resolution;
  for (const auto& [x, y] : points.points) {
    int col = std::min(static_cast<int>(x * r), r - 1);
    int row = std::min(static_cast<int>(y * r), r - 1);
    std::size_t cell = static_cast<std::size_t>(row) * r + col;
    // harmonic mean of lambda/area = (1/area) / mean(1/lambda)
    double log_tilde = -std::log(mean_inv_lambda[cell]) - std::log(cell_area);
    log_sum += log_tilde;
    result.per_point_cpo.push_back(log_tilde - integral_share);
  }
  result.lpml = log_sum - integral;
  return result;
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::json j{{"mae", report.mae}};
  if (report.lpml) j["lpml"] = *report.lpml;
  if (report.rand_index) j["rand_index"] = *report.rand_index;
  if (!report.per_point_cpo.empty()) j["per_point_cpo_count"] = report.per_point_cpo.size();
  return j.dump(2);
}

void write_metrics_json_file(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write metrics JSON: " + path);
  out << metrics_to_json(report) << "\n";
}

void write_cpo_csv_file(const std::vector<double>& cpo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write CPO CSV: " + path);
  out.precision(17);
  out << "point_index,log_cpo\n";
  for (std::size_t i = 0; i < cpo.size(); ++i) out << i << ',' << cpo[i] << "\n";
}

}  // namespace nhpp
