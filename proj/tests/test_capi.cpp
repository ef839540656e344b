#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "nhppcluster.h"

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "nhpp_capi_test";
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return out;
}

}  // namespace

TEST_CASE("C API end-to-end: simulate, fit, summarize, evaluate") {
  TempDir dir;

  nhpp_sim_options sim;
  nhpp_sim_options_init(&sim);
  sim.scenario = 1;
  sim.seed = 7;
  sim.with_points = 1;
  REQUIRE(nhpp_simulate(&sim, dir.file("counts.csv").c_str(), dir.file("truth.csv").c_str(),
                        dir.file("points.csv").c_str()) == NHPP_OK);

  nhpp_dataset* dataset = nullptr;
  REQUIRE(nhpp_dataset_from_counts_csv(dir.file("counts.csv").c_str(), &dataset) == NHPP_OK);
  CHECK(nhpp_dataset_resolution(dataset) == 20);
  CHECK(nhpp_dataset_total_count(dataset) > 0);
  REQUIRE(nhpp_dataset_load_points_csv(dataset, dir.file("points.csv").c_str()) == NHPP_OK);
  CHECK(nhpp_dataset_point_count(dataset) ==
        static_cast<size_t>(nhpp_dataset_total_count(dataset)));

  nhpp_fit_options fit_opts;
  nhpp_fit_options_init(&fit_opts);
  fit_opts.total_iters = 600;
  fit_opts.burnin = 200;
  fit_opts.seed = 11;
  nhpp_fit* fit = nullptr;
  REQUIRE(nhpp_run_fit(dataset, &fit_opts, &fit) == NHPP_OK);
  CHECK(nhpp_fit_draw_count(fit) == 400);
  CHECK(nhpp_fit_resolution(fit) == 20);

  REQUIRE(nhpp_fit_save(fit, dir.file("draws.ndjson").c_str()) == NHPP_OK);
  nhpp_fit* loaded = nullptr;
  REQUIRE(nhpp_fit_load(dir.file("draws.ndjson").c_str(), &loaded) == NHPP_OK);
  CHECK(nhpp_fit_draw_count(loaded) == 400);

  nhpp_summary_options sum_opts;
  nhpp_summary_options_init(&sum_opts);
  REQUIRE(nhpp_fit_write_summary(fit, &sum_opts, dir.file("summary.json").c_str(),
                                 dir.file("mean.csv").c_str(),
                                 dir.file("dahl.csv").c_str()) == NHPP_OK);
  CHECK(slurp(dir.file("summary.json")).find("k_mode") != std::string::npos);
  CHECK(slurp(dir.file("mean.csv")).rfind("resolution,20", 0) == 0);

  REQUIRE(nhpp_evaluate(fit, dataset, dir.file("truth.csv").c_str(),
                        dir.file("metrics.json").c_str(),
                        dir.file("cpo.csv").c_str()) == NHPP_OK);
  auto metrics = slurp(dir.file("metrics.json"));
  CHECK(metrics.find("mae") != std::string::npos);
  CHECK(metrics.find("lpml") != std::string::npos);
  CHECK(metrics.find("rand_index") != std::string::npos);

  nhpp_fit_free(loaded);
  nhpp_fit_free(fit);
  nhpp_dataset_free(dataset);
}

TEST_CASE("C API error paths carry codes and messages") {
  nhpp_dataset* dataset = nullptr;
  CHECK(nhpp_dataset_from_counts_csv("/no/such/file.csv", &dataset) == NHPP_ERR_IO);
  CHECK(std::string(nhpp_error_message()).find("file.csv") != std::string::npos);
  CHECK(nhpp_dataset_from_counts_csv(nullptr, &dataset) == NHPP_ERR_INVALID);

  TempDir dir;
  std::ofstream(dir.file("bad.csv")) << "not,a,grid\n1,2,3\n";
  CHECK(nhpp_dataset_from_counts_csv(dir.file("bad.csv").c_str(), &dataset) ==
        NHPP_ERR_INVALID);

  // Mismatched grids: fit on 2x2, evaluate against 3x3.
  std::ofstream(dir.file("g2.csv")) << "resolution,2\n1,2\n3,4\n";
  std::ofstream(dir.file("g3.csv")) << "resolution,3\n1,2,3\n4,5,6\n7,8,9\n";
  nhpp_dataset *g2 = nullptr, *g3 = nullptr;
  REQUIRE(nhpp_dataset_from_counts_csv(dir.file("g2.csv").c_str(), &g2) == NHPP_OK);
  REQUIRE(nhpp_dataset_from_counts_csv(dir.file("g3.csv").c_str(), &g3) == NHPP_OK);
  nhpp_fit_options fit_opts;
  nhpp_fit_options_init(&fit_opts);
  fit_opts.total_iters = 50;
  fit_opts.burnin = 10;
  fit_opts.k_init = 2;
  nhpp_fit* fit = nullptr;
  REQUIRE(nhpp_run_fit(g2, &fit_opts, &fit) == NHPP_OK);
  CHECK(nhpp_evaluate(fit, g3, nullptr, dir.file("m.json").c_str(), nullptr) ==
        NHPP_ERR_INVALID);

  // Capacity: Dahl cap below the cell count.
  nhpp_summary_options sum_opts;
  nhpp_summary_options_init(&sum_opts);
  sum_opts.dahl_cell_cap = 2;
  CHECK(nhpp_fit_write_summary(fit, &sum_opts, dir.file("s.json").c_str(), nullptr,
                               nullptr) == NHPP_ERR_CAPACITY);

  nhpp_fit_free(fit);
  nhpp_dataset_free(g2);
  nhpp_dataset_free(g3);
}

TEST_CASE("C API USGS ingestion") {
  TempDir dir;
  std::ofstream(dir.file("events.csv"))
      << "time,latitude,longitude,mag,place\n"
         "2018-10-01T00:00:00Z,61.28,-151.15,4.6,\"Alaska\"\n"
         "2018-10-02T00:00:00Z,0.0,0.0,3.0,\"weak\"\n"
         "2018-10-03T00:00:00Z,10.0,20.0,5.1,\"kept\"\n";
  nhpp_dataset* dataset = nullptr;
  REQUIRE(nhpp_dataset_from_usgs_csv(dir.file("events.csv").c_str(), 10, 0, 4.0,
                                     &dataset) == NHPP_OK);
  CHECK(nhpp_dataset_total_count(dataset) == 2);  // magnitude filter drops one
  CHECK(nhpp_dataset_point_count(dataset) == 2);
  nhpp_dataset_free(dataset);
}

TEST_CASE("C API bench smoke run") {
  TempDir dir;
  nhpp_bench_options opts;
  nhpp_bench_options_init(&opts);
  opts.scenario.scenario = 1;
  opts.scenario.seed = 5;
  opts.replicates = 2;
  opts.workers = 2;
  opts.fit.total_iters = 300;
  opts.fit.burnin = 100;
  REQUIRE(nhpp_bench(&opts, dir.file("bench.json").c_str(),
                     dir.file("replicates.csv").c_str()) == NHPP_OK);
  auto json = slurp(dir.file("bench.json"));
  CHECK(json.find("k_recovery_rate") != std::string::npos);
  CHECK(slurp(dir.file("replicates.csv")).find("replicate,recovered_k") !=
        std::string::npos);
}
