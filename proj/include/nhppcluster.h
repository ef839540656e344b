/*
 * C API for the MFM-NHPP intensity clustering library.
 *
 * All functions return a status code; NHPP_OK is 0. On failure,
 * nhpp_error_message() returns a thread-local description of the most
 * recent error. Objects returned through out-parameters are owned by the
 * caller and released with the matching *_free function.
 */
#ifndef NHPPCLUSTER_H
#define NHPPCLUSTER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define NHPP_OK 0
#define NHPP_ERR_INVALID 2  /* bad input or parameters */
#define NHPP_ERR_IO 3       /* filesystem failure */
#define NHPP_ERR_NUMERIC 4  /* numerical failure */
#define NHPP_ERR_CAPACITY 5 /* resource cap (raise it explicitly) */

typedef struct nhpp_dataset nhpp_dataset; /* grid counts + optional point pattern */
typedef struct nhpp_fit nhpp_fit;         /* posterior draws + config echo */

const char* nhpp_error_message(void);

/* ---- datasets ---- */

int nhpp_dataset_from_counts_csv(const char* path, nhpp_dataset** out);

/* Ingest a USGS-style event CSV: parse, optional magnitude threshold
 * (pass NaN or a negative huge value to disable), unit-square transform
 * (frame 0 = global, 1 = data bounding box), and grid binning. */
int nhpp_dataset_from_usgs_csv(const char* path, int resolution, int frame,
                               double min_magnitude, nhpp_dataset** out);

/* Attach unit-square event locations from a points CSV (x,y header). */
int nhpp_dataset_load_points_csv(nhpp_dataset* dataset, const char* path);

int nhpp_dataset_write_counts_csv(const nhpp_dataset* dataset, const char* path);
int nhpp_dataset_write_points_csv(const nhpp_dataset* dataset, const char* path);

int nhpp_dataset_resolution(const nhpp_dataset* dataset);
long long nhpp_dataset_total_count(const nhpp_dataset* dataset);
size_t nhpp_dataset_point_count(const nhpp_dataset* dataset);

void nhpp_dataset_free(nhpp_dataset* dataset);

/* ---- simulation ---- */

typedef struct {
  int scenario;          /* 1 or 2; 0 = use layout/lambdas below */
  const char* layout;    /* "bands-3" or "blocks-6" when scenario == 0 */
  const double* lambdas; /* true intensities when scenario == 0 */
  size_t lambda_count;
  int resolution;
  uint64_t seed;
  int with_points; /* also scatter event locations */
} nhpp_sim_options;

void nhpp_sim_options_init(nhpp_sim_options* opts);

/* Writes the counts grid and truth labels; points_csv_path may be NULL. */
int nhpp_simulate(const nhpp_sim_options* opts, const char* counts_csv_path,
                  const char* truth_csv_path, const char* points_csv_path);

/* ---- fitting ---- */

typedef struct {
  double gamma;        /* Dirichlet concentration */
  double a, b;         /* Gamma prior on cluster intensities */
  double k_prior_mean; /* truncated-Poisson prior on k */
  int total_iters;
  int burnin;
  int k_init;
  uint64_t seed;
  int random_scan; /* 0 = fixed ascending sweep order */
} nhpp_fit_options;

void nhpp_fit_options_init(nhpp_fit_options* opts);

int nhpp_run_fit(const nhpp_dataset* dataset, const nhpp_fit_options* opts,
                 nhpp_fit** out);

int nhpp_fit_save(const nhpp_fit* fit, const char* path);
int nhpp_fit_load(const char* path, nhpp_fit** out);

size_t nhpp_fit_draw_count(const nhpp_fit* fit);
int nhpp_fit_resolution(const nhpp_fit* fit);

void nhpp_fit_free(nhpp_fit* fit);

/* ---- posterior summary ---- */

typedef struct {
  size_t dahl_cell_cap; /* refuse Dahl beyond this many cells */
  int dahl_thin;        /* use every k-th draw for Dahl */
} nhpp_summary_options;

void nhpp_summary_options_init(nhpp_summary_options* opts);

/* Writes the FitSummary JSON plus posterior-mean and Dahl intensity grids
 * (count scale). Either grid path may be NULL to skip it. */
int nhpp_fit_write_summary(const nhpp_fit* fit, const nhpp_summary_options* opts,
                           const char* summary_json_path,
                           const char* mean_grid_csv_path,
                           const char* dahl_grid_csv_path);

/* ---- assessment ---- */

/* MAE always; LPML when the dataset carries points; Rand index when
 * truth_csv_path is non-NULL. cpo_csv_path may be NULL. */
int nhpp_evaluate(const nhpp_fit* fit, const nhpp_dataset* dataset,
                  const char* truth_csv_path, const char* metrics_json_path,
                  const char* cpo_csv_path);

/* ---- benchmark ---- */

typedef struct {
  nhpp_sim_options scenario;
  nhpp_fit_options fit;
  nhpp_summary_options summary;
  int replicates;
  int workers;
} nhpp_bench_options;

void nhpp_bench_options_init(nhpp_bench_options* opts);

int nhpp_bench(const nhpp_bench_options* opts, const char* summary_json_path,
               const char* replicates_csv_path);

#ifdef __cplusplus
}
#endif

#endif /* NHPPCLUSTER_H */
