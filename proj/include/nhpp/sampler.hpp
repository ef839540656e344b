#ifndef NHPP_SAMPLER_HPP
#define NHPP_SAMPLER_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nhpp/geo.hpp"
#include "nhpp/mfm.hpp"
#include "nhpp/rng.hpp"

namespace nhpp {

// Current sampler state. Labels are 0-based and contiguous; no empty clusters.
struct ChainState {
  std::vector<int> labels;                  // z, length n
  std::vector<double> lambdas;              // per-cluster cell-level intensity
  std::vector<int> cluster_sizes;           // n_r
  std::vector<long long> cluster_count_sums;  // N-bar_r

  int cluster_count() const { return static_cast<int>(lambdas.size()); }
  void check_invariants(const GridCounts& counts) const;  // throws on violation
};

struct Draw {
  std::vector<int> labels;
  std::vector<double> lambdas;

  int cluster_count() const { return static_cast<int>(lambdas.size()); }
};

struct PosteriorDraws {
  std::vector<Draw> draws;  // post burn-in snapshots
  int resolution = 0;
  std::size_t n_cells = 0;
  MfmConfig config;
  std::uint64_t seed = 0;
  int burnin = 0;
  int total_iters = 0;
  std::string rng_algorithm;
};

struct SamplerOptions {
  int total_iters = 5000;
  int burnin = 2000;
  int k_init = 5;
  std::uint64_t seed = 0;
  bool random_scan = false;  // default: fixed ascending sweep order
};

ChainState init_state(const GridCounts& counts, int k_init, const MfmConfig& cfg, Rng& rng);

// Conjugate refresh: lambda_r ~ Gamma(Nbar_r + a, n_r + b).
void update_lambdas(ChainState& state, const MfmConfig& cfg, Rng& rng);

// Restaurant-process reassignment of cell i. The V_n table may be extended;
// callers pass it by reference for that reason.
void update_assignment(std::size_t i, ChainState& state, const GridCounts& counts,
                       LogVnTable& vn, const MfmConfig& cfg, Rng& rng);

PosteriorDraws run_chain(const GridCounts& counts, const MfmConfig& cfg,
                         const SamplerOptions& opts);

// Newline-delimited archive: JSON header line, then one JSON record per draw
// with a run-length-encoded z and the lambda vector.
void write_draws(const PosteriorDraws& draws, std::ostream& out);
void write_draws_file(const PosteriorDraws& draws, const std::string& path);
PosteriorDraws read_draws(std::istream& in);
PosteriorDraws read_draws_file(const std::string& path);

}  // namespace nhpp

#endif
