#include "nhpp/mfm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nhpp/errors.hpp"

namespace nhpp {

void MfmConfig::validate() const {
  if (!(gamma > 0.0)) throw validation_error("gamma must be positive");
  if (!(a > 0.0) || !(b > 0.0)) throw validation_error("a and b must be positive");
  if (!(k_prior_mean > 0.0)) throw validation_error("k prior mean must be positive");
  if (!(vn_tol > 0.0)) throw validation_error("vn_tol must be positive");
  if (vn_kmax < 1) throw validation_error("vn_kmax must be >= 1");
}

double k_prior_log_pmf(int k, double mean) {
  if (k < 1) throw validation_error("k prior support starts at 1");
  // Poisson(mean) restricted to {1,2,...}: p(k) = mean^k e^{-mean} / (k! (1 - e^{-mean}))
  return k * std::log(mean) - mean - std::lgamma(k + 1.0) -
         std::log1p(-std::exp(-mean));
}

double k_prior_total_mass(double mean, int k_max) {
  double mass = 0.0;
  for (int k = 1; k <= k_max; ++k) mass += std::exp(k_prior_log_pmf(k, mean));
  return mass;
}

double log_marginal_count(long long count, double a, double b) {
  if (count < 0) throw validation_error("count must be nonnegative");
  if (!(a > 0.0) || !(b > 0.0)) throw validation_error("a and b must be positive");
  double n = static_cast<double>(count);
  return a * std::log(b) + std::lgamma(n + a) - std::lgamma(a) -
         (n + a) * std::log(b + 1.0) - std::lgamma(n + 1.0);
}

double poisson_log_pmf(long long count, double lambda) {
  if (!(lambda > 0.0)) throw validation_error("lambda must be positive");
  if (count < 0) throw validation_error("count must be nonnegative");
  double n = static_cast<double>(count);
  return n * std::log(lambda) - lambda - std::lgamma(n + 1.0);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

namespace {

// log of the rising factorial x(x+1)...(x+m-1).
double log_rising(double x, std::size_t m) {
  return std::lgamma(x + static_cast<double>(m)) - std::lgamma(x);
}

// log of the falling factorial k(k-1)...(k-t+1), valid for k >= t >= 1.
double log_falling(std::size_t k, std::size_t t) {
  return std::lgamma(k + 1.0) - std::lgamma(k - t + 1.0);
}

// V_n(t) = sum_{k>=t} k_(t) / (gamma k)^(n) p(k), summed in log space.
double compute_log_vn(std::size_t n, std::size_t t, const MfmConfig& cfg) {
  double log_sum = -std::numeric_limits<double>::infinity();
  int terms = 0;
  for (std::size_t k = t; k <= static_cast<std::size_t>(cfg.vn_kmax); ++k, ++terms) {
    double term = log_falling(k, t) - log_rising(cfg.gamma * k, n) +
                  k_prior_log_pmf(static_cast<int>(k), cfg.k_prior_mean);
    if (term >= log_sum) {
      log_sum = term + std::log1p(std::exp(log_sum - term));
    } else {
      log_sum += std::log1p(std::exp(term - log_sum));
    }
    // Terms decay factorially under a Poisson-type prior once past the mode;
    // require a few terms before trusting the tail bound.
    if (terms >= 4 && term - log_sum < std::log(cfg.vn_tol)) return log_sum;
  }
  throw numeric_error("V_n(" + std::to_string(t) + ") series did not meet tolerance " +
                      std::to_string(cfg.vn_tol) + " within " +
                      std::to_string(cfg.vn_kmax) + " terms");
}

}  // namespace

LogVnTable::LogVnTable(std::size_t n_cells, std::size_t t_max, const MfmConfig& cfg)
    : n_(n_cells), cfg_(cfg) {
  cfg.validate();
  if (n_cells < 1) throw validation_error("V_n table needs n >= 1");
  if (t_max < 1) throw validation_error("V_n table needs t_max >= 1");
  values_.reserve(t_max);
  for (std::size_t t = 1; t <= t_max; ++t) values_.push_back(compute_log_vn(n_, t, cfg_));
}

}  // namespace nhpp
