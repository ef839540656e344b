#ifndef NHPP_SUMMARY_HPP
#define NHPP_SUMMARY_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "nhpp/sampler.hpp"

namespace nhpp {

// Mean co-clustering matrix, packed strict upper triangle in row-major pair
// order: (0,1), (0,2), ..., (0,n-1), (1,2), ... Diagonal is identically 1
// and not stored.
struct CoclusteringMean {
  std::size_t n = 0;
  std::vector<float> upper;  // n*(n-1)/2 entries in [0,1]

  static std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
    // requires i < j
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
  }
  float at(std::size_t i, std::size_t j) const {
    if (i == j) return 1.0f;
    if (i > j) std::swap(i, j);
    return upper[pair_index(i, j, n)];
  }
};

struct SummaryOptions {
  std::size_t dahl_cell_cap = 4096;  // refuse larger n unless raised
  int dahl_thin = 1;                 // use every k-th draw for Dahl
};

struct FitSummary {
  std::size_t dahl_iteration = 0;      // index into the stored draws
  std::vector<int> dahl_labels;
  std::vector<double> dahl_lambdas;
  std::vector<double> mean_intensity;  // per-cell posterior mean, count scale
  std::map<int, std::size_t> k_histogram;
  int k_mode = 0;
};

// B-bar over (possibly thinned) draws. Throws capacity_error when n exceeds
// the cap.
CoclusteringMean coclustering_mean(const PosteriorDraws& draws, const SummaryOptions& opts = {});

struct DahlSelection {
  std::size_t iteration;  // index among the draws used (after thinning, mapped back)
  std::vector<int> labels;
  std::vector<double> lambdas;
  double distance;  // least-squares distance to B-bar
};

DahlSelection dahl_select(const PosteriorDraws& draws, const CoclusteringMean& mean,
                          const SummaryOptions& opts = {});

std::vector<double> posterior_mean_intensity(const PosteriorDraws& draws);

struct KPosterior {
  std::map<int, std::size_t> histogram;
  int mode = 0;
};

KPosterior k_posterior(const PosteriorDraws& draws);

FitSummary summarize(const PosteriorDraws& draws, const SummaryOptions& opts = {});

// JSON serialization; the intensity grids go through the grid CSV writer.
std::string fit_summary_to_json(const FitSummary& summary, int resolution);
void write_fit_summary_json_file(const FitSummary& summary, int resolution,
                                 const std::string& path);
void write_intensity_grid_csv_file(const std::vector<double>& cell_values,
                                   int resolution, const std::string& path);

}  // namespace nhpp

#endif
