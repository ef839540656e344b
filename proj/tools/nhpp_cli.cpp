// Command-line front end for the MFM-NHPP clustering library. Talks to the
// core exclusively through the C API in nhppcluster.h.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhppcluster.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(int status) {
  switch (status) {
    case NHPP_OK:
      return 0;
    case NHPP_ERR_NUMERIC:
      return kExitNumeric;
    default:
      return kExitUsage;  // invalid input, I/O, capacity
  }
}

// Returns the mapped exit code after printing the library's error message.
int fail(int status) {
  std::cerr << "error: " << nhpp_error_message() << "\n";
  return exit_code_for(status);
}

bool ensure_dir(const std::string& dir) {
  std::error_code ec;
  if (std::filesystem::is_directory(dir, ec)) return true;
  std::cerr << "error: output directory does not exist: " << dir << "\n";
  return false;
}

std::vector<double> parse_lambda_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

bool looks_like_counts_csv(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  return in && std::getline(in, line) && line.rfind("resolution,", 0) == 0;
}

// JSON config file: top-level keys matching long option names (without the
// dashes) become defaults appended to argv; explicit flags override them.
// Returns false (after printing) on a bad config file.
bool apply_config_defaults(std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config_path = args[i + 1];
  if (config_path.empty()) return true;

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config file: " << config_path << "\n";
    return false;
  }
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad config JSON: " << e.what() << "\n";
    return false;
  }
  if (!cfg.is_object()) {
    std::cerr << "error: config JSON must be an object\n";
    return false;
  }
  for (auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    bool given = std::find(args.begin(), args.end(), flag) != args.end();
    if (given) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else {
      args.push_back(flag);
      args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return true;
}

struct SimArgs {
  int scenario = 1;
  std::string layout;
  std::string lambdas;
  int resolution = 20;
  std::uint64_t seed = 0;
  bool with_points = false;
  std::string out_dir = ".";
};

void fill_sim_options(const SimArgs& args, nhpp_sim_options* opts,
                      std::vector<double>& lambda_storage) {
  nhpp_sim_options_init(opts);
  if (!args.layout.empty()) {
    lambda_storage = parse_lambda_list(args.lambdas);
    opts->scenario = 0;
    opts->layout = args.layout.c_str();
    opts->lambdas = lambda_storage.data();
    opts->lambda_count = lambda_storage.size();
  } else {
    opts->scenario = args.scenario;
  }
  opts->resolution = args.resolution;
  opts->seed = args.seed;
  opts->with_points = args.with_points ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian intensity clustering for spatial point patterns (MFM-NHPP)"};
  app.require_subcommand(1);

  std::string config_path;

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic counts grid");
  SimArgs sim_args;
  sim->add_option("--config", config_path, "JSON config file");
  sim->add_option("--scenario", sim_args.scenario, "Built-in scenario (1 or 2)");
  sim->add_option("--layout", sim_args.layout, "Named layout (bands-3, blocks-6)");
  sim->add_option("--lambdas", sim_args.lambdas, "True intensities, comma separated");
  sim->add_option("--resolution", sim_args.resolution, "Grid resolution r (r x r cells)");
  sim->add_option("--seed", sim_args.seed, "RNG seed");
  sim->add_flag("--with-points", sim_args.with_points, "Also emit event locations");
  sim->add_option("--out-dir", sim_args.out_dir, "Output directory");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "Run the collapsed Gibbs sampler");
  std::string fit_input, fit_points, fit_frame = "global", fit_out_dir = ".";
  int fit_resolution = 20;
  double fit_min_mag = std::nan("");
  nhpp_fit_options fit_opts;
  nhpp_fit_options_init(&fit_opts);
  nhpp_summary_options sum_opts;
  nhpp_summary_options_init(&sum_opts);
  bool fit_random_scan = false;
  fit->add_option("--config", config_path, "JSON config file");
  fit->add_option("--input", fit_input, "Counts CSV or raw USGS event CSV")->required();
  fit->add_option("--points", fit_points, "Unit-square points CSV (with a counts input)");
  fit->add_option("--resolution", fit_resolution, "Grid resolution for raw event input");
  fit->add_option("--frame", fit_frame, "Unit-square frame: global or bbox")
      ->check(CLI::IsMember({"global", "bbox"}));
  fit->add_option("--min-mag", fit_min_mag, "Drop events below this magnitude");
  fit->add_option("--iters", fit_opts.total_iters, "Total MCMC iterations");
  fit->add_option("--burnin", fit_opts.burnin, "Burn-in iterations");
  fit->add_option("--k-init", fit_opts.k_init, "Initial number of clusters");
  fit->add_option("--seed", fit_opts.seed, "RNG seed");
  fit->add_option("--gamma", fit_opts.gamma, "Dirichlet concentration");
  fit->add_option("--a", fit_opts.a, "Gamma prior shape");
  fit->add_option("--b", fit_opts.b, "Gamma prior rate");
  fit->add_option("--k-prior-mean", fit_opts.k_prior_mean, "Truncated-Poisson mean for k");
  fit->add_flag("--random-scan", fit_random_scan, "Randomize sweep order");
  fit->add_option("--dahl-cap", sum_opts.dahl_cell_cap, "Max cells for Dahl summary");
  fit->add_option("--dahl-thin", sum_opts.dahl_thin, "Use every k-th draw for Dahl");
  fit->add_option("--out-dir", fit_out_dir, "Output directory");

  // ---- evaluate ----
  auto* eval = app.add_subcommand("evaluate", "Compute MAE / LPML / Rand index");
  std::string eval_draws, eval_counts, eval_points, eval_truth, eval_out = "metrics.json",
              eval_cpo;
  eval->add_option("--config", config_path, "JSON config file");
  eval->add_option("--draws", eval_draws, "Draws archive from fit")->required();
  eval->add_option("--counts", eval_counts, "Counts CSV the fit used")->required();
  eval->add_option("--points", eval_points, "Unit-square points CSV (enables LPML)");
  eval->add_option("--truth", eval_truth, "Truth labels CSV (enables Rand index)");
  eval->add_option("--out", eval_out, "Metrics JSON output path");
  eval->add_option("--cpo", eval_cpo, "Per-point CPO CSV output path");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "Replicated simulation benchmark");
  SimArgs bench_args;
  nhpp_bench_options bench_opts;
  nhpp_bench_options_init(&bench_opts);
  if (const char* env = std::getenv("NHPP_WORKERS")) bench_opts.workers = std::atoi(env);
  std::string bench_out_dir = ".";
  bench->add_option("--config", config_path, "JSON config file");
  bench->add_option("--scenario", bench_args.scenario, "Built-in scenario (1 or 2)");
  bench->add_option("--layout", bench_args.layout, "Named layout (bands-3, blocks-6)");
  bench->add_option("--lambdas", bench_args.lambdas, "True intensities, comma separated");
  bench->add_option("--resolution", bench_args.resolution, "Grid resolution");
  bench->add_option("--seed", bench_args.seed, "Master seed");
  bench->add_option("--replicates", bench_opts.replicates, "Number of replicates");
  bench->add_option("--workers", bench_opts.workers, "Parallel workers");
  bench->add_option("--iters", bench_opts.fit.total_iters, "Total MCMC iterations");
  bench->add_option("--burnin", bench_opts.fit.burnin, "Burn-in iterations");
  bench->add_option("--gamma", bench_opts.fit.gamma, "Dirichlet concentration");
  bench->add_option("--a", bench_opts.fit.a, "Gamma prior shape");
  bench->add_option("--b", bench_opts.fit.b, "Gamma prior rate");
  bench->add_option("--dahl-thin", bench_opts.summary.dahl_thin, "Dahl draw thinning");
  bench->add_option("--out-dir", bench_out_dir, "Output directory");

  std::vector<std::string> args(argv + 1, argv + argc);
  if (!apply_config_defaults(args)) return kExitUsage;
  // CLI11 consumes the vector form in reverse order.
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (sim->parsed()) {
    if (!ensure_dir(sim_args.out_dir)) return kExitUsage;
    nhpp_sim_options opts;
    std::vector<double> lambda_storage;
    try {
      fill_sim_options(sim_args, &opts, lambda_storage);
    } catch (const std::exception& e) {
      std::cerr << "error: bad --lambdas list: " << e.what() << "\n";
      return kExitUsage;
    }
    auto path = [&](const char* name) { return sim_args.out_dir + "/" + name; };
    int rc = nhpp_simulate(&opts, path("counts.csv").c_str(), path("truth.csv").c_str(),
                           sim_args.with_points ? path("points.csv").c_str() : nullptr);
    if (rc != NHPP_OK) return fail(rc);
    std::cout << "wrote " << path("counts.csv") << " and " << path("truth.csv") << "\n";
    return 0;
  }

  if (fit->parsed()) {
    if (!ensure_dir(fit_out_dir)) return kExitUsage;
    fit_opts.random_scan = fit_random_scan ? 1 : 0;
    nhpp_dataset* dataset = nullptr;
    int rc;
    bool raw_input = !looks_like_counts_csv(fit_input);
    if (raw_input) {
      rc = nhpp_dataset_from_usgs_csv(fit_input.c_str(), fit_resolution,
                                      fit_frame == "bbox" ? 1 : 0, fit_min_mag, &dataset);
    } else {
      rc = nhpp_dataset_from_counts_csv(fit_input.c_str(), &dataset);
    }
    if (rc != NHPP_OK) return fail(rc);
    if (!fit_points.empty()) {
      rc = nhpp_dataset_load_points_csv(dataset, fit_points.c_str());
      if (rc != NHPP_OK) return fail(rc);
    }

    auto path = [&](const char* name) { return fit_out_dir + "/" + name; };
    if (raw_input) {
      // Echo the derived grid and points so evaluate can run from files.
      if ((rc = nhpp_dataset_write_counts_csv(dataset, path("counts.csv").c_str())) !=
          NHPP_OK)
        return fail(rc);
      if ((rc = nhpp_dataset_write_points_csv(dataset, path("points.csv").c_str())) !=
          NHPP_OK)
        return fail(rc);
    }

    nhpp_fit* result = nullptr;
    if ((rc = nhpp_run_fit(dataset, &fit_opts, &result)) != NHPP_OK) {
      nhpp_dataset_free(dataset);
      return fail(rc);
    }
    if ((rc = nhpp_fit_save(result, path("draws.ndjson").c_str())) != NHPP_OK ||
        (rc = nhpp_fit_write_summary(result, &sum_opts, path("summary.json").c_str(),
                                     path("mean_intensity.csv").c_str(),
                                     path("dahl_intensity.csv").c_str())) != NHPP_OK) {
      nhpp_fit_free(result);
      nhpp_dataset_free(dataset);
      return fail(rc);
    }
    std::cout << "fit complete: " << nhpp_fit_draw_count(result) << " draws at resolution "
              << nhpp_fit_resolution(result) << ", outputs in " << fit_out_dir << "\n";
    nhpp_fit_free(result);
    nhpp_dataset_free(dataset);
    return 0;
  }

  if (eval->parsed()) {
    nhpp_dataset* dataset = nullptr;
    int rc = nhpp_dataset_from_counts_csv(eval_counts.c_str(), &dataset);
    if (rc != NHPP_OK) return fail(rc);
    if (!eval_points.empty() &&
        (rc = nhpp_dataset_load_points_csv(dataset, eval_points.c_str())) != NHPP_OK) {
      nhpp_dataset_free(dataset);
      return fail(rc);
    }
    nhpp_fit* result = nullptr;
    if ((rc = nhpp_fit_load(eval_draws.c_str(), &result)) != NHPP_OK) {
      nhpp_dataset_free(dataset);
      return fail(rc);
    }
    rc = nhpp_evaluate(result, dataset, eval_truth.empty() ? nullptr : eval_truth.c_str(),
                       eval_out.c_str(), eval_cpo.empty() ? nullptr : eval_cpo.c_str());
    nhpp_fit_free(result);
    nhpp_dataset_free(dataset);
    if (rc != NHPP_OK) return fail(rc);
    std::cout << "wrote " << eval_out << "\n";
    return 0;
  }

  if (bench->parsed()) {
    if (!ensure_dir(bench_out_dir)) return kExitUsage;
    std::vector<double> lambda_storage;
    try {
      fill_sim_options(bench_args, &bench_opts.scenario, lambda_storage);
    } catch (const std::exception& e) {
      std::cerr << "error: bad --lambdas list: " << e.what() << "\n";
      return kExitUsage;
    }
    auto path = [&](const char* name) { return bench_out_dir + "/" + name; };
    int rc = nhpp_bench(&bench_opts, path("bench.json").c_str(),
                        path("replicates.csv").c_str());
    if (rc != NHPP_OK) return fail(rc);
    std::cout << "wrote " << path("bench.json") << " and " << path("replicates.csv") << "\n";
    return 0;
  }

  return kExitUsage;
}
