#include "nhpp/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "nhpp/assess.hpp"
#include "nhpp/errors.hpp"

namespace nhpp {

void ScenarioSpec::validate() const {
  if (resolution < 1) throw validation_error("resolution must be >= 1");
  int k = cluster_count();
  if (k < 1) throw validation_error("need at least one true cluster");
  for (double l : true_lambdas)
    if (!(l > 0.0)) throw validation_error("true intensities must be positive");
  if (layout.size() != static_cast<std::size_t>(resolution) * resolution)
    throw validation_error("layout does not match the grid");
  std::vector<bool> seen(k, false);
  for (int z : layout) {
    if (z < 0 || z >= k) throw validation_error("layout label out of range");
    seen[z] = true;
  }
  for (int j = 0; j < k; ++j)
    if (!seen[j]) throw validation_error("true cluster " + std::to_string(j + 1) + " is empty");
}

std::vector<int> named_layout(const std::string& name, int resolution) {
  std::size_t n = static_cast<std::size_t>(resolution) * resolution;
  std::vector<int> layout(n);
  if (name == "bands-3") {
    for (int row = 0; row < resolution; ++row)
      for (int col = 0; col < resolution; ++col)
        layout[static_cast<std::size_t>(row) * resolution + col] =
            std::min(col * 3 / resolution, 2);
  } else if (name == "blocks-6") {
    for (int row = 0; row < resolution; ++row)
      for (int col = 0; col < resolution; ++col) {
        int block_row = std::min(row * 2 / resolution, 1);
        int block_col = std::min(col * 3 / resolution, 2);
        layout[static_cast<std::size_t>(row) * resolution + col] = block_row * 3 + block_col;
      }
  } else {
    throw validation_error("unknown layout '" + name + "' (expected bands-3 or blocks-6)");
  }
  return layout;
}

ScenarioSpec scenario_spec(int scenario, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.resolution = 20;
  spec.seed = seed;
  if (scenario == 1) {
    spec.true_lambdas = {0.2, 10.0, 20.0};
    spec.layout = named_layout("bands-3", 20);
  } else if (scenario == 2) {
    spec.true_lambdas = {0.2, 5.0, 20.0, 40.0, 80.0, 200.0};
    spec.layout = named_layout("blocks-6", 20);
  } else {
    throw validation_error("scenario must be 1 or 2");
  }
  return spec;
}

SimulatedData generate_counts(const ScenarioSpec& spec, Rng& rng, bool with_points) {
  spec.validate();
  SimulatedData data;
  data.counts.resolution = spec.resolution;
  data.counts.counts.resize(spec.layout.size());
  data.truth = spec.layout;
  int r = spec.resolution;
  for (std::size_t i = 0; i < spec.layout.size(); ++i) {
    long long count = static_cast<long long>(rng.poisson(spec.true_lambdas[spec.layout[i]]));
    data.counts.counts[i] = count;
    if (with_points) {
      int row = static_cast<int>(i) / r;
      int col = static_cast<int>(i) % r;
      for (long long p = 0; p < count; ++p)
        data.points.points.emplace_back(rng.uniform(col / double(r), (col + 1) / double(r)),
                                        rng.uniform(row / double(r), (row + 1) / double(r)));
    }
  }
  return data;
}

namespace {

ReplicateResult run_one(const ScenarioSpec& spec, std::size_t index, const BenchOptions& opts) {
  Rng rng = Rng::for_replicate(spec.seed, index);
  SimulatedData data = generate_counts(spec, rng, false);

  SamplerOptions sampler = opts.sampler;
  sampler.seed = Rng::for_replicate(spec.seed ^ 0x5ca1ab1e5ca1ab1eULL, index).next_u64();
  PosteriorDraws draws = run_chain(data.counts, opts.config, sampler);

  auto mean = coclustering_mean(draws, opts.summary);
  auto dahl = dahl_select(draws, mean, opts.summary);
  auto cell_means = posterior_mean_intensity(draws);

  ReplicateResult result;
  result.recovered_k = static_cast<int>(dahl.lambdas.size());
  result.rand_idx = rand_index(dahl.labels, spec.layout);

  result.dahl_sorted_lambdas = dahl.lambdas;
  std::sort(result.dahl_sorted_lambdas.begin(), result.dahl_sorted_lambdas.end());

  // Posterior-mean per-cluster estimate: average the per-cell posterior means
  // over the cells of each Dahl cluster.
  std::vector<double> sums(dahl.lambdas.size(), 0.0);
  std::vector<int> sizes(dahl.lambdas.size(), 0);
  for (std::size_t i = 0; i < dahl.labels.size(); ++i) {
    sums[dahl.labels[i]] += cell_means[i];
    ++sizes[dahl.labels[i]];
  }
  for (std::size_t c = 0; c < sums.size(); ++c)
    result.mean_sorted_lambdas.push_back(sums[c] / sizes[c]);
  std::sort(result.mean_sorted_lambdas.begin(), result.mean_sorted_lambdas.end());

  int k_true = spec.cluster_count();
  std::vector<int> true_sizes(k_true, 0);
  for (int z : spec.layout) ++true_sizes[z];
  result.posterior_cluster_mse.assign(k_true, 0.0);
  std::vector<double> cluster_avg(k_true);
  for (const auto& draw : draws.draws) {
    std::fill(cluster_avg.begin(), cluster_avg.end(), 0.0);
    for (std::size_t i = 0; i < spec.layout.size(); ++i)
      cluster_avg[spec.layout[i]] += draw.lambdas[draw.labels[i]];
    for (int c = 0; c < k_true; ++c) {
      double d = cluster_avg[c] / true_sizes[c] - spec.true_lambdas[c];
      result.posterior_cluster_mse[c] += d * d;
    }
  }
  for (double& v : result.posterior_cluster_mse)
    v /= static_cast<double>(draws.draws.size());
  return result;
}

std::vector<ClusterRecovery> aggregate(
    const std::vector<const ReplicateResult*>& recovered,
    std::vector<double> true_sorted,
    std::vector<double> ReplicateResult::*estimates) {
  std::sort(true_sorted.begin(), true_sorted.end());
  std::vector<ClusterRecovery> out(true_sorted.size());
  double r_count = static_cast<double>(recovered.size());
  for (std::size_t j = 0; j < true_sorted.size(); ++j) {
    double mean_err = 0.0;
    for (const auto* rep : recovered) mean_err += (rep->*estimates)[j] - true_sorted[j];
    mean_err /= r_count;
    double var = 0.0;
    for (const auto* rep : recovered) {
      double d = (rep->*estimates)[j] - true_sorted[j] - mean_err;
      var += d * d;
    }
    double sd = recovered.size() > 1 ? std::sqrt(var / (r_count - 1.0)) : 0.0;
    out[j].true_lambda = true_sorted[j];
    out[j].bias = mean_err;
    out[j].sd = sd;
    out[j].mse = mean_err * mean_err + var / r_count;  // = bias^2 + sd^2 (R-1)/R
  }
  return out;
}

}  // namespace

ReplicateSummary run_replicates(const ScenarioSpec& spec, int replicate_count,
                                const BenchOptions& opts) {
  spec.validate();
  if (replicate_count < 1) throw validation_error("need at least one replicate");
  int workers = std::max(1, opts.workers);

  std::vector<ReplicateResult> results(replicate_count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t index = next.fetch_add(1);
      if (index >= static_cast<std::size_t>(replicate_count)) return;
      try {
        results[index] = run_one(spec, index, opts);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ReplicateSummary summary;
  summary.replicates = static_cast<std::size_t>(replicate_count);
  std::vector<const ReplicateResult*> recovered;
  double rand_sum = 0.0;
  for (const auto& rep : results) {
    rand_sum += rep.rand_idx;
    if (rep.recovered_k == spec.cluster_count()) recovered.push_back(&rep);
  }
  summary.mean_rand_index = rand_sum / static_cast<double>(replicate_count);
  summary.recovered_replicates = recovered.size();
  summary.k_recovery_rate =
      static_cast<double>(recovered.size()) / static_cast<double>(replicate_count);
  if (!recovered.empty()) {
    summary.dahl = aggregate(recovered, spec.true_lambdas, &ReplicateResult::dahl_sorted_lambdas);
    summary.posterior_mean =
        aggregate(recovered, spec.true_lambdas, &ReplicateResult::mean_sorted_lambdas);
  }
  summary.per_replicate = std::move(results);
  return summary;
}

namespace {

nlohmann::json recovery_json(const std::vector<ClusterRecovery>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows)
    arr.push_back({{"true_lambda", row.true_lambda},
                   {"bias", row.bias},
                   {"sd", row.sd},
                   {"mse", row.mse}});
  return arr;
}

}  // namespace

std::string replicate_summary_to_json(const ReplicateSummary& summary,
                                      const ScenarioSpec& spec) {
  nlohmann::json j{{"resolution", spec.resolution},
                   {"true_lambdas", spec.true_lambdas},
                   {"seed", spec.seed},
                   {"replicates", summary.replicates},
                   {"recovered_replicates", summary.recovered_replicates},
                   {"k_recovery_rate", summary.k_recovery_rate},
                   {"mean_rand_index", summary.mean_rand_index},
                   {"dahl", recovery_json(summary.dahl)},
                   {"posterior_mean", recovery_json(summary.posterior_mean)}};
  return j.dump(2);
}

void write_replicate_summary_json_file(const ReplicateSummary& summary,
                                       const ScenarioSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write bench summary JSON: " + path);
  out << replicate_summary_to_json(summary, spec) << "\n";
}

void write_replicates_csv_file(const ReplicateSummary& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write replicate CSV: " + path);
  out.precision(17);
  out << "replicate,recovered_k,rand_index,dahl_lambdas,mean_lambdas\n";
  for (std::size_t i = 0; i < summary.per_replicate.size(); ++i) {
    const auto& rep = summary.per_replicate[i];
    auto join = [](const std::vector<double>& v) {
      std::string s;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (j) s += ';';
        s += std::to_string(v[j]);
      }
      return s;
    };
    out << i << ',' << rep.recovered_k << ',' << rep.rand_idx << ','
        << join(rep.dahl_sorted_lambdas) << ',' << join(rep.mean_sorted_lambdas) << "\n";
  }
}

void write_truth_csv_file(const std::vector<int>& truth, int resolution,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write truth CSV: " + path);
  out << "resolution," << resolution << "\n";
  for (int row = 0; row < resolution; ++row) {
    for (int col = 0; col < resolution; ++col) {
      if (col) out << ',';
      out << truth[static_cast<std::size_t>(row) * resolution + col] + 1;
    }
    out << "\n";
  }
}

std::vector<int> read_truth_csv_file(const std::string& path, int& resolution) {
  GridCounts grid = read_grid_csv_file(path);
  resolution = grid.resolution;
  std::vector<int> truth(grid.counts.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (grid.counts[i] < 1) throw validation_error("truth labels must be >= 1");
    truth[i] = static_cast<int>(grid.counts[i]) - 1;
  }
  return truth;
}

}  // namespace nhpp
