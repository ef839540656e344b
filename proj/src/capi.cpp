#include "nhppcluster.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "nhpp/assess.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/geo.hpp"
#include "nhpp/sampler.hpp"
#include "nhpp/sim.hpp"
#include "nhpp/summary.hpp"

struct nhpp_dataset {
  nhpp::GridCounts grid;
  std::optional<nhpp::PointPattern> points;
};

struct nhpp_fit {
  nhpp::PosteriorDraws draws;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return NHPP_OK;
  } catch (const nhpp::capacity_error& e) {
    return set_error(NHPP_ERR_CAPACITY, e.what());
  } catch (const nhpp::numeric_error& e) {
    return set_error(NHPP_ERR_NUMERIC, e.what());
  } catch (const nhpp::io_error& e) {
    return set_error(NHPP_ERR_IO, e.what());
  } catch (const nhpp::validation_error& e) {
    return set_error(NHPP_ERR_INVALID, e.what());
  } catch (const std::exception& e) {
    return set_error(NHPP_ERR_NUMERIC, e.what());
  }
}

int require(bool condition, const char* message) {
  return condition ? NHPP_OK : set_error(NHPP_ERR_INVALID, message);
}

nhpp::ScenarioSpec scenario_from_options(const nhpp_sim_options& opts) {
  if (opts.scenario == 1 || opts.scenario == 2)
    return nhpp::scenario_spec(opts.scenario, opts.seed);
  if (opts.scenario != 0)
    throw nhpp::validation_error("scenario must be 0, 1 or 2");
  if (!opts.layout || !opts.lambdas || opts.lambda_count == 0)
    throw nhpp::validation_error("custom scenario needs layout and lambdas");
  nhpp::ScenarioSpec spec;
  spec.resolution = opts.resolution;
  spec.seed = opts.seed;
  spec.true_lambdas.assign(opts.lambdas, opts.lambdas + opts.lambda_count);
  spec.layout = nhpp::named_layout(opts.layout, opts.resolution);
  int max_label = *std::max_element(spec.layout.begin(), spec.layout.end());
  if (max_label + 1 != static_cast<int>(opts.lambda_count))
    throw nhpp::validation_error("layout '" + std::string(opts.layout) + "' needs " +
                                 std::to_string(max_label + 1) + " intensities");
  return spec;
}

nhpp::SamplerOptions sampler_from_options(const nhpp_fit_options& opts) {
  nhpp::SamplerOptions sampler;
  sampler.total_iters = opts.total_iters;
  sampler.burnin = opts.burnin;
  sampler.k_init = opts.k_init;
  sampler.seed = opts.seed;
  sampler.random_scan = opts.random_scan != 0;
  return sampler;
}

nhpp::MfmConfig config_from_options(const nhpp_fit_options& opts) {
  nhpp::MfmConfig cfg;
  cfg.gamma = opts.gamma;
  cfg.a = opts.a;
  cfg.b = opts.b;
  cfg.k_prior_mean = opts.k_prior_mean;
  return cfg;
}

nhpp::SummaryOptions summary_from_options(const nhpp_summary_options& opts) {
  nhpp::SummaryOptions summary;
  summary.dahl_cell_cap = opts.dahl_cell_cap;
  summary.dahl_thin = opts.dahl_thin;
  return summary;
}

}  // namespace

extern "C" {

const char* nhpp_error_message(void) { return g_last_error.c_str(); }

int nhpp_dataset_from_counts_csv(const char* path, nhpp_dataset** out) {
  if (int rc = require(path && out, "null argument")) return rc;
  return guarded([&] {
    auto dataset = std::make_unique<nhpp_dataset>();
    dataset->grid = nhpp::read_grid_csv_file(path);
    *out = dataset.release();
  });
}

int nhpp_dataset_from_usgs_csv(const char* path, int resolution, int frame,
                               double min_magnitude, nhpp_dataset** out) {
  if (int rc = require(path && out, "null argument")) return rc;
  return guarded([&] {
    auto report = nhpp::parse_usgs_csv_file(path);
    std::vector<nhpp::RawEvent> events;
    for (auto& ev : report.events) {
      if (!std::isnan(min_magnitude) &&
          (!ev.magnitude || *ev.magnitude < min_magnitude))
        continue;
      events.push_back(std::move(ev));
    }
    auto mode = frame == 1 ? nhpp::FrameMode::BoundingBox : nhpp::FrameMode::Global;
    auto dataset = std::make_unique<nhpp_dataset>();
    dataset->points = nhpp::to_unit_square(events, mode);
    dataset->grid = nhpp::bin_counts(*dataset->points, resolution);
    *out = dataset.release();
  });
}

int nhpp_dataset_load_points_csv(nhpp_dataset* dataset, const char* path) {
  if (int rc = require(dataset && path, "null argument")) return rc;
  return guarded([&] { dataset->points = nhpp::read_points_csv_file(path); });
}

int nhpp_dataset_write_counts_csv(const nhpp_dataset* dataset, const char* path) {
  if (int rc = require(dataset && path, "null argument")) return rc;
  return guarded([&] { nhpp::write_grid_csv_file(dataset->grid, path); });
}

int nhpp_dataset_write_points_csv(const nhpp_dataset* dataset, const char* path) {
  if (int rc = require(dataset && path, "null argument")) return rc;
  return guarded([&] {
    if (!dataset->points) throw nhpp::validation_error("dataset has no point pattern");
    nhpp::write_points_csv_file(*dataset->points, path);
  });
}

int nhpp_dataset_resolution(const nhpp_dataset* dataset) {
  return dataset ? dataset->grid.resolution : 0;
}

long long nhpp_dataset_total_count(const nhpp_dataset* dataset) {
  return dataset ? dataset->grid.total() : 0;
}

size_t nhpp_dataset_point_count(const nhpp_dataset* dataset) {
  return dataset && dataset->points ? dataset->points->count() : 0;
}

void nhpp_dataset_free(nhpp_dataset* dataset) { delete dataset; }

void nhpp_sim_options_init(nhpp_sim_options* opts) {
  *opts = nhpp_sim_options{};
  opts->scenario = 1;
  opts->resolution = 20;
}

int nhpp_simulate(const nhpp_sim_options* opts, const char* counts_csv_path,
                  const char* truth_csv_path, const char* points_csv_path) {
  if (int rc = require(opts && counts_csv_path && truth_csv_path, "null argument"))
    return rc;
  return guarded([&] {
    auto spec = scenario_from_options(*opts);
    nhpp::Rng rng(spec.seed);
    auto data = nhpp::generate_counts(spec, rng, opts->with_points != 0);
    nhpp::write_grid_csv_file(data.counts, counts_csv_path);
    nhpp::write_truth_csv_file(data.truth, spec.resolution, truth_csv_path);
    if (points_csv_path) {
      if (!opts->with_points)
        throw nhpp::validation_error("points path given but with_points is off");
      nhpp::write_points_csv_file(data.points, points_csv_path);
    }
  });
}

void nhpp_fit_options_init(nhpp_fit_options* opts) {
  opts->gamma = 1.0;
  opts->a = 1.0;
  opts->b = 1.0;
  opts->k_prior_mean = 1.0;
  opts->total_iters = 5000;
  opts->burnin = 2000;
  opts->k_init = 5;
  opts->seed = 0;
  opts->random_scan = 0;
}

int nhpp_run_fit(const nhpp_dataset* dataset, const nhpp_fit_options* opts,
                 nhpp_fit** out) {
  if (int rc = require(dataset && opts && out, "null argument")) return rc;
  return guarded([&] {
    auto fit = std::make_unique<nhpp_fit>();
    fit->draws = nhpp::run_chain(dataset->grid, config_from_options(*opts),
                                 sampler_from_options(*opts));
    *out = fit.release();
  });
}

int nhpp_fit_save(const nhpp_fit* fit, const char* path) {
  if (int rc = require(fit && path, "null argument")) return rc;
  return guarded([&] { nhpp::write_draws_file(fit->draws, path); });
}

int nhpp_fit_load(const char* path, nhpp_fit** out) {
  if (int rc = require(path && out, "null argument")) return rc;
  return guarded([&] {
    auto fit = std::make_unique<nhpp_fit>();
    fit->draws = nhpp::read_draws_file(path);
    *out = fit.release();
  });
}

size_t nhpp_fit_draw_count(const nhpp_fit* fit) {
  return fit ? fit->draws.draws.size() : 0;
}

int nhpp_fit_resolution(const nhpp_fit* fit) {
  return fit ? fit->draws.resolution : 0;
}

void nhpp_fit_free(nhpp_fit* fit) { delete fit; }

void nhpp_summary_options_init(nhpp_summary_options* opts) {
  opts->dahl_cell_cap = 4096;
  opts->dahl_thin = 1;
}

int nhpp_fit_write_summary(const nhpp_fit* fit, const nhpp_summary_options* opts,
                           const char* summary_json_path,
                           const char* mean_grid_csv_path,
                           const char* dahl_grid_csv_path) {
  if (int rc = require(fit && opts && summary_json_path, "null argument")) return rc;
  return guarded([&] {
    auto summary = nhpp::summarize(fit->draws, summary_from_options(*opts));
    nhpp::write_fit_summary_json_file(summary, fit->draws.resolution, summary_json_path);
    if (mean_grid_csv_path)
      nhpp::write_intensity_grid_csv_file(summary.mean_intensity, fit->draws.resolution,
                                          mean_grid_csv_path);
    if (dahl_grid_csv_path) {
      std::vector<double> dahl_grid(fit->draws.n_cells);
      for (std::size_t i = 0; i < dahl_grid.size(); ++i)
        dahl_grid[i] = summary.dahl_lambdas[summary.dahl_labels[i]];
      nhpp::write_intensity_grid_csv_file(dahl_grid, fit->draws.resolution,
                                          dahl_grid_csv_path);
    }
  });
}

int nhpp_evaluate(const nhpp_fit* fit, const nhpp_dataset* dataset,
                  const char* truth_csv_path, const char* metrics_json_path,
                  const char* cpo_csv_path) {
  if (int rc = require(fit && dataset && metrics_json_path, "null argument")) return rc;
  return guarded([&] {
    if (fit->draws.n_cells != dataset->grid.cell_count())
      throw nhpp::validation_error("fit and dataset resolutions do not match");
    nhpp::MetricsReport report;
    auto mean = nhpp::posterior_mean_intensity(fit->draws);
    report.mae = nhpp::mae(mean, dataset->grid);
    if (dataset->points) {
      auto result = nhpp::lpml(*dataset->points, fit->draws, dataset->grid);
      report.lpml = result.lpml;
      report.per_point_cpo = std::move(result.per_point_cpo);
    }
    if (truth_csv_path) {
      int truth_resolution = 0;
      auto truth = nhpp::read_truth_csv_file(truth_csv_path, truth_resolution);
      if (truth_resolution != dataset->grid.resolution)
        throw nhpp::validation_error("truth grid resolution does not match");
      // Rand index against the Dahl clustering; a posterior-mean surface has
      // no partition to compare.
      auto cocluster = nhpp::coclustering_mean(fit->draws);
      auto dahl = nhpp::dahl_select(fit->draws, cocluster);
      report.rand_index = nhpp::rand_index(dahl.labels, truth);
    }
    nhpp::write_metrics_json_file(report, metrics_json_path);
    if (cpo_csv_path && !report.per_point_cpo.empty())
      nhpp::write_cpo_csv_file(report.per_point_cpo, cpo_csv_path);
  });
}

void nhpp_bench_options_init(nhpp_bench_options* opts) {
  nhpp_sim_options_init(&opts->scenario);
  nhpp_fit_options_init(&opts->fit);
  nhpp_summary_options_init(&opts->summary);
  opts->replicates = 100;
  opts->workers = 1;
}

int nhpp_bench(const nhpp_bench_options* opts, const char* summary_json_path,
               const char* replicates_csv_path) {
  if (int rc = require(opts && summary_json_path, "null argument")) return rc;
  return guarded([&] {
    auto spec = scenario_from_options(opts->scenario);
    nhpp::BenchOptions bench;
    bench.sampler = sampler_from_options(opts->fit);
    bench.summary = summary_from_options(opts->summary);
    bench.config = config_from_options(opts->fit);
    bench.workers = opts->workers;
    auto summary = nhpp::run_replicates(spec, opts->replicates, bench);
    nhpp::write_replicate_summary_json_file(summary, spec, summary_json_path);
    if (replicates_csv_path) nhpp::write_replicates_csv_file(summary, replicates_csv_path);
  });
}

}  // extern "C"
