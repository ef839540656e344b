#include "nhpp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "nhpp/errors.hpp"

namespace nhpp {

void ChainState::check_invariants(const GridCounts& counts) const {
  std::size_t n = counts.cell_count();
  if (labels.size() != n) throw numeric_error("state label vector has wrong length");
  int k = cluster_count();
  if (static_cast<int>(cluster_sizes.size()) != k ||
      static_cast<int>(cluster_count_sums.size()) != k)
    throw numeric_error("state cluster vectors are inconsistent");
  std::vector<int> sizes(k, 0);
  std::vector<long long> sums(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int z = labels[i];
    if (z < 0 || z >= k) throw numeric_error("label out of range");
    ++sizes[z];
    sums[z] += counts.counts[i];
  }
  for (int r = 0; r < k; ++r) {
    if (sizes[r] == 0) throw numeric_error("empty cluster");
    if (sizes[r] != cluster_sizes[r] || sums[r] != cluster_count_sums[r])
      throw numeric_error("cluster bookkeeping drifted");
    if (!(lambdas[r] > 0.0)) throw numeric_error("nonpositive lambda");
  }
}

ChainState init_state(const GridCounts& counts, int k_init, const MfmConfig& cfg, Rng& rng) {
  std::size_t n = counts.cell_count();
  if (k_init < 1 || static_cast<std::size_t>(k_init) > n)
    throw validation_error("k_init must be in [1, n]");
  ChainState state;
  state.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    state.labels[i] = static_cast<int>(rng.uniform_index(static_cast<std::uint32_t>(k_init)));

  // Compact away clusters the random allocation left empty.
  std::vector<int> remap(k_init, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int& z = state.labels[i];
    if (remap[z] < 0) remap[z] = next++;
    z = remap[z];
  }
  state.cluster_sizes.assign(next, 0);
  state.cluster_count_sums.assign(next, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++state.cluster_sizes[state.labels[i]];
    state.cluster_count_sums[state.labels[i]] += counts.counts[i];
  }
  state.lambdas.resize(next);
  for (double& l : state.lambdas) l = rng.gamma(cfg.a, cfg.b);
  return state;
}

void update_lambdas(ChainState& state, const MfmConfig& cfg, Rng& rng) {
  for (int r = 0; r < state.cluster_count(); ++r)
    state.lambdas[r] = rng.gamma(static_cast<double>(state.cluster_count_sums[r]) + cfg.a,
                                 static_cast<double>(state.cluster_sizes[r]) + cfg.b);
}

namespace {

void remove_cell(std::size_t i, ChainState& state, long long count) {
  int z = state.labels[i];
  if (--state.cluster_sizes[z] == 0) {
    // Cluster died: move the last cluster into its slot.
    int last = state.cluster_count() - 1;
    if (z != last) {
      state.lambdas[z] = state.lambdas[last];
      state.cluster_sizes[z] = state.cluster_sizes[last];
      state.cluster_count_sums[z] = state.cluster_count_sums[last];
      for (int& label : state.labels)
        if (label == last) label = z;
    }
    state.lambdas.pop_back();
    state.cluster_sizes.pop_back();
    state.cluster_count_sums.pop_back();
  } else {
    state.cluster_count_sums[z] -= count;
  }
  state.labels[i] = -1;
}

}  // namespace

void update_assignment(std::size_t i, ChainState& state, const GridCounts& counts,
                       LogVnTable& vn, const MfmConfig& cfg, Rng& rng) {
  long long count_i = counts.counts[i];
  remove_cell(i, state, count_i);

  std::size_t t = static_cast<std::size_t>(state.cluster_count());
  if (t == 0) {
    // Only cell in the grid: a fresh cluster is the only option.
    state.lambdas.push_back(rng.gamma(static_cast<double>(count_i) + cfg.a, 1.0 + cfg.b));
    state.cluster_sizes.push_back(1);
    state.cluster_count_sums.push_back(count_i);
    state.labels[i] = 0;
    return;
  }
  if (t + 1 > vn.t_max()) vn = vn.extended(std::max(t + 1, vn.t_max() * 2));

  // log(N!) is common to every option and dropped from the existing-cluster
  // terms; the marginal m(N) already carries it, so drop it there too.
  double n_count = static_cast<double>(count_i);
  std::vector<double> log_w(t + 1);
  for (std::size_t c = 0; c < t; ++c)
    log_w[c] = std::log(state.cluster_sizes[c] + cfg.gamma) +
               n_count * std::log(state.lambdas[c]) - state.lambdas[c];
  log_w[t] = std::log(cfg.gamma) + vn.at(t + 1) - vn.at(t) +
             cfg.a * std::log(cfg.b) + std::lgamma(n_count + cfg.a) -
             std::lgamma(cfg.a) - (n_count + cfg.a) * std::log(cfg.b + 1.0);

  double log_norm = log_sum_exp(log_w);
  double u = rng.uniform();
  double acc = 0.0;
  std::size_t choice = t;
  for (std::size_t c = 0; c <= t; ++c) {
    acc += std::exp(log_w[c] - log_norm);
    if (u <= acc) {
      choice = c;
      break;
    }
  }

  if (choice == t) {
    state.lambdas.push_back(rng.gamma(n_count + cfg.a, 1.0 + cfg.b));
    state.cluster_sizes.push_back(1);
    state.cluster_count_sums.push_back(count_i);
  } else {
    ++state.cluster_sizes[choice];
    state.cluster_count_sums[choice] += count_i;
  }
  state.labels[i] = static_cast<int>(choice);
}

PosteriorDraws run_chain(const GridCounts& counts, const MfmConfig& cfg,
                         const SamplerOptions& opts) {
  cfg.validate();
  if (opts.burnin < 0 || opts.burnin >= opts.total_iters)
    throw validation_error("burnin must be in [0, total_iters)");
  std::size_t n = counts.cell_count();
  if (n == 0) throw validation_error("empty grid");

  Rng rng(opts.seed);
  ChainState state = init_state(counts, opts.k_init, cfg, rng);
  LogVnTable vn(n, std::min<std::size_t>(n, 64), cfg);

  PosteriorDraws out;
  out.resolution = counts.resolution;
  out.n_cells = n;
  out.config = cfg;
  out.seed = opts.seed;
  out.burnin = opts.burnin;
  out.total_iters = opts.total_iters;
  out.rng_algorithm = std::string(Rng::algorithm);
  out.draws.reserve(static_cast<std::size_t>(opts.total_iters - opts.burnin));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int iter = 0; iter < opts.total_iters; ++iter) {
    update_lambdas(state, cfg, rng);
    if (opts.random_scan) {
      for (std::size_t j = n; j > 1; --j)
        std::swap(order[j - 1], order[rng.uniform_index(static_cast<std::uint32_t>(j))]);
    }
    for (std::size_t i : order) update_assignment(i, state, counts, vn, cfg, rng);
    if (iter >= opts.burnin) out.draws.push_back({state.labels, state.lambdas});
  }
  return out;
}

void write_draws(const PosteriorDraws& draws, std::ostream& out) {
  nlohmann::json header{
      {"format", "nhpp-draws-v1"},
      {"n_cells", draws.n_cells},
      {"resolution", draws.resolution},
      {"seed", draws.seed},
      {"burnin", draws.burnin},
      {"total_iters", draws.total_iters},
      {"rng", draws.rng_algorithm},
      {"config",
       {{"gamma", draws.config.gamma},
        {"a", draws.config.a},
        {"b", draws.config.b},
        {"k_prior_mean", draws.config.k_prior_mean},
        {"vn_tol", draws.config.vn_tol},
        {"vn_kmax", draws.config.vn_kmax}}}};
  out << header.dump() << "\n";
  for (const auto& draw : draws.draws) {
    nlohmann::json rle = nlohmann::json::array();
    std::size_t i = 0;
    while (i < draw.labels.size()) {
      std::size_t j = i;
      while (j < draw.labels.size() && draw.labels[j] == draw.labels[i]) ++j;
      rle.push_back({draw.labels[i], j - i});
      i = j;
    }
    nlohmann::json record{{"z_rle", std::move(rle)}, {"lambda", draw.lambdas}};
    out << record.dump() << "\n";
  }
}

void write_draws_file(const PosteriorDraws& draws, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write draws archive: " + path);
  write_draws(draws, out);
}

PosteriorDraws read_draws(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw validation_error("draws archive is empty");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("bad draws header: ") + e.what());
  }
  if (header.value("format", "") != "nhpp-draws-v1")
    throw validation_error("unrecognized draws archive format");

  PosteriorDraws draws;
  draws.n_cells = header.at("n_cells").get<std::size_t>();
  draws.resolution = header.at("resolution").get<int>();
  draws.seed = header.at("seed").get<std::uint64_t>();
  draws.burnin = header.at("burnin").get<int>();
  draws.total_iters = header.at("total_iters").get<int>();
  draws.rng_algorithm = header.value("rng", "");
  const auto& cfg = header.at("config");
  draws.config.gamma = cfg.at("gamma").get<double>();
  draws.config.a = cfg.at("a").get<double>();
  draws.config.b = cfg.at("b").get<double>();
  draws.config.k_prior_mean = cfg.at("k_prior_mean").get<double>();
  draws.config.vn_tol = cfg.at("vn_tol").get<double>();
  draws.config.vn_kmax = cfg.at("vn_kmax").get<int>();

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw validation_error(std::string("bad draw record: ") + e.what());
    }
    Draw draw;
    for (const auto& run : record.at("z_rle")) {
      int label = run.at(0).get<int>();
      std::size_t len = run.at(1).get<std::size_t>();
      draw.labels.insert(draw.labels.end(), len, label);
    }
    draw.lambdas = record.at("lambda").get<std::vector<double>>();
    if (draw.labels.size() != draws.n_cells)
      throw validation_error("draw record has wrong cell count");
    draws.draws.push_back(std::move(draw));
  }
  return draws;
}

PosteriorDraws read_draws_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open draws archive: " + path);
  return read_draws(in);
}

}  // namespace nhpp
