#include "nhpp/summary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "nhpp/errors.hpp"

namespace nhpp {

namespace {

std::vector<std::vector<std::size_t>> cluster_members(const Draw& draw) {
  std::vector<std::vector<std::size_t>> members(draw.cluster_count());
  for (std::size_t i = 0; i < draw.labels.size(); ++i)
    members[draw.labels[i]].push_back(i);
  return members;
}

std::vector<std::size_t> thinned_indices(std::size_t m, int thin) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m; i += static_cast<std::size_t>(thin)) idx.push_back(i);
  return idx;
}

}  // namespace

CoclusteringMean coclustering_mean(const PosteriorDraws& draws, const SummaryOptions& opts) {
  if (draws.draws.empty()) throw validation_error("no stored draws");
  std::size_t n = draws.n_cells;
  if (n > opts.dahl_cell_cap)
    throw capacity_error(
        "Dahl summary refused for n=" + std::to_string(n) + " cells (cap " +
        std::to_string(opts.dahl_cell_cap) +
        "); lower the resolution, thin the draws, or raise the cap");
  if (opts.dahl_thin < 1) throw validation_error("dahl_thin must be >= 1");

  CoclusteringMean mean;
  mean.n = n;
  mean.upper.assign(n * (n - 1) / 2, 0.0f);

  auto used = thinned_indices(draws.draws.size(), opts.dahl_thin);
  for (std::size_t m : used) {
    for (const auto& cluster : cluster_members(draws.draws[m])) {
      for (std::size_t p = 0; p < cluster.size(); ++p) {
        std::size_t i = cluster[p];
        std::size_t base = i * (2 * n - i - 1) / 2 - i - 1;
        for (std::size_t q = p + 1; q < cluster.size(); ++q)
          mean.upper[base + cluster[q]] += 1.0f;
      }
    }
  }
  float inv = 1.0f / static_cast<float>(used.size());
  for (float& v : mean.upper) v *= inv;
  return mean;
}

DahlSelection dahl_select(const PosteriorDraws& draws, const CoclusteringMean& mean,
                          const SummaryOptions& opts) {
  if (draws.draws.empty()) throw validation_error("no stored draws");
  if (mean.n != draws.n_cells) throw validation_error("B-bar built for a different grid");
  std::size_t n = mean.n;

  // Over unordered pairs: sum (B - Bbar)^2 = sum_{co-clustered} (1 - 2 Bbar)
  // + sum Bbar^2; the second term is constant across draws.
  double const_term = 0.0;
  for (float v : mean.upper) const_term += static_cast<double>(v) * v;

  auto used = thinned_indices(draws.draws.size(), opts.dahl_thin);
  double best = 0.0;
  std::size_t best_m = 0;
  bool first = true;
  for (std::size_t m : used) {
    double dist = const_term;
    for (const auto& cluster : cluster_members(draws.draws[m])) {
      for (std::size_t p = 0; p < cluster.size(); ++p) {
        std::size_t i = cluster[p];
        std::size_t base = i * (2 * n - i - 1) / 2 - i - 1;
        for (std::size_t q = p + 1; q < cluster.size(); ++q)
          dist += 1.0 - 2.0 * static_cast<double>(mean.upper[base + cluster[q]]);
      }
    }
    if (first || dist < best) {
      best = dist;
      best_m = m;
      first = false;
    }
  }
  const auto& sel = draws.draws[best_m];
  // Report the full-matrix distance (both triangles; diagonal cancels).
  return {best_m, sel.labels, sel.lambdas, 2.0 * best};
}

std::vector<double> posterior_mean_intensity(const PosteriorDraws& draws) {
  if (draws.draws.empty()) throw validation_error("no stored draws");
  std::vector<double> mean(draws.n_cells, 0.0);
  for (const auto& draw : draws.draws)
    for (std::size_t i = 0; i < mean.size(); ++i)
      mean[i] += draw.lambdas[draw.labels[i]];
  for (double& v : mean) v /= static_cast<double>(draws.draws.size());
  return mean;
}

KPosterior k_posterior(const PosteriorDraws& draws) {
  if (draws.draws.empty()) throw validation_error("no stored draws");
  KPosterior posterior;
  for (const auto& draw : draws.draws) ++posterior.histogram[draw.cluster_count()];
  std::size_t best = 0;
  for (const auto& [k, freq] : posterior.histogram) {
    if (freq > best) {
      best = freq;
      posterior.mode = k;
    }
  }
  return posterior;
}

FitSummary summarize(const PosteriorDraws& draws, const SummaryOptions& opts) {
  auto mean = coclustering_mean(draws, opts);
  auto selection = dahl_select(draws, mean, opts);
  auto k = k_posterior(draws);
  FitSummary summary;
  summary.dahl_iteration = selection.iteration;
  summary.dahl_labels = std::move(selection.labels);
  summary.dahl_lambdas = std::move(selection.lambdas);
  summary.mean_intensity = posterior_mean_intensity(draws);
  summary.k_histogram = std::move(k.histogram);
  summary.k_mode = k.mode;
  return summary;
}

std::string fit_summary_to_json(const FitSummary& summary, int resolution) {
  double cell_area = 1.0 / (static_cast<double>(resolution) * resolution);
  nlohmann::json k_hist = nlohmann::json::object();
  for (const auto& [k, freq] : summary.k_histogram) k_hist[std::to_string(k)] = freq;
  nlohmann::json j{
      {"resolution", resolution},
      {"dahl_iteration", summary.dahl_iteration},
      {"dahl_cluster_count", summary.dahl_lambdas.size()},
      {"dahl_labels", summary.dahl_labels},
      {"dahl_lambdas", summary.dahl_lambdas},
      {"mean_intensity", summary.mean_intensity},
      {"cell_area", cell_area},
      {"k_histogram", std::move(k_hist)},
      {"k_mode", summary.k_mode}};
  return j.dump(2);
}

void write_fit_summary_json_file(const FitSummary& summary, int resolution,
                                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write summary JSON: " + path);
  out << fit_summary_to_json(summary, resolution) << "\n";
}

void write_intensity_grid_csv_file(const std::vector<double>& cell_values,
                                   int resolution, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write intensity grid: " + path);
  out.precision(17);
  out << "resolution," << resolution << "\n";
  for (int row = 0; row < resolution; ++row) {
    for (int col = 0; col < resolution; ++col) {
      if (col) out << ',';
      out << cell_values[static_cast<std::size_t>(row) * resolution + col];
    }
    out << "\n";
  }
}

}  // namespace nhpp
