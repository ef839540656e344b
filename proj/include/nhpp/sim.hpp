#ifndef NHPP_SIM_HPP
#define NHPP_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nhpp/geo.hpp"
#include "nhpp/sampler.hpp"
#include "nhpp/summary.hpp"

namespace nhpp {

struct ScenarioSpec {
  int resolution = 20;
  std::vector<double> true_lambdas;  // length K, all positive
  std::vector<int> layout;           // per-cell true cluster, 0-based, length r*r
  std::uint64_t seed = 0;

  int cluster_count() const { return static_cast<int>(true_lambdas.size()); }
  void validate() const;
};

// Named layouts. bands-3: three vertical bands of columns. blocks-6: a 2x3
// grid of rectangular blocks.
std::vector<int> named_layout(const std::string& name, int resolution);

// Built-in scenarios: 1 -> bands-3 with (0.2, 10, 20),
// 2 -> blocks-6 with (0.2, 5, 20, 40, 80, 200), both at 20x20.
ScenarioSpec scenario_spec(int scenario, std::uint64_t seed);

struct SimulatedData {
  GridCounts counts;
  std::vector<int> truth;  // copy of the layout
  PointPattern points;     // events scattered uniformly inside their cells
};

SimulatedData generate_counts(const ScenarioSpec& spec, Rng& rng, bool with_points = false);

struct ClusterRecovery {
  double true_lambda = 0.0;
  double bias = 0.0;
  double sd = 0.0;
  double mse = 0.0;  // bias^2 + sd^2 (R-1)/R
};

struct ReplicateResult {
  int recovered_k = 0;
  double rand_idx = 0.0;
  std::vector<double> dahl_sorted_lambdas;  // ascending
  std::vector<double> mean_sorted_lambdas;  // per-Dahl-cluster means, ascending
  // Per true cluster: mean over draws of the squared deviation of the
  // cluster's average drawn cell intensity from its true value.
  std::vector<double> posterior_cluster_mse;
};

struct ReplicateSummary {
  double k_recovery_rate = 0.0;
  double mean_rand_index = 0.0;
  std::size_t replicates = 0;
  std::size_t recovered_replicates = 0;
  std::vector<ClusterRecovery> dahl;        // aggregated on the recovered subset
  std::vector<ClusterRecovery> posterior_mean;
  std::vector<ReplicateResult> per_replicate;
};

struct BenchOptions {
  SamplerOptions sampler;  // sampler.seed is ignored; seeds derive from spec.seed
  SummaryOptions summary;
  MfmConfig config;
  int workers = 1;
};

// R independent generate/fit/summarize runs. Deterministic in (spec.seed,
// replicate index) regardless of worker count.
ReplicateSummary run_replicates(const ScenarioSpec& spec, int replicate_count,
                                const BenchOptions& opts);

std::string replicate_summary_to_json(const ReplicateSummary& summary,
                                      const ScenarioSpec& spec);
void write_replicate_summary_json_file(const ReplicateSummary& summary,
                                       const ScenarioSpec& spec, const std::string& path);
void write_replicates_csv_file(const ReplicateSummary& summary, const std::string& path);

// Truth labels reuse the grid CSV layout (resolution header + label rows,
// 1-based labels on disk).
void write_truth_csv_file(const std::vector<int>& truth, int resolution,
                          const std::string& path);
std::vector<int> read_truth_csv_file(const std::string& path, int& resolution);

}  // namespace nhpp

#endif
