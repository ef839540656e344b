#ifndef NHPP_MFM_HPP
#define NHPP_MFM_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace nhpp {

// Prior and algorithm hyperparameters for the MFM-NHPP model.
struct MfmConfig {
  double gamma = 1.0;        // Dirichlet concentration
  double a = 1.0;            // Gamma shape on cluster intensities
  double b = 1.0;            // Gamma rate on cluster intensities
  double k_prior_mean = 1.0; // mean of the truncated-Poisson prior on k
  double vn_tol = 1e-12;     // relative tail tolerance for the V_n series
  int vn_kmax = 500;         // hard cap on series terms

  void validate() const;  // throws validation_error
};

// log p(k) under Poisson(mean) truncated to k >= 1. Throws on k < 1.
double k_prior_log_pmf(int k, double mean = 1.0);

// Partial-sum check that the k prior is a proper pmf; returns the accumulated
// mass over k = 1..k_max.
double k_prior_total_mass(double mean, int k_max);

// log of the Gamma-Poisson marginal m(N) = b^a G(N+a) / (G(a) (b+1)^{N+a} N!).
double log_marginal_count(long long count, double a, double b);

// N log(lambda) - lambda - log(N!). Throws on lambda <= 0.
double poisson_log_pmf(long long count, double lambda);

// log(sum exp(x_i)) without overflow; -inf for an empty span.
double log_sum_exp(std::span<const double> values);

// Precomputed log V_n(t) coefficients of the MFM partition distribution.
// Immutable after construction; extend() returns a larger copy.
class LogVnTable {
 public:
  LogVnTable(std::size_t n_cells, std::size_t t_max, const MfmConfig& cfg);

  std::size_t n_cells() const { return n_; }
  std::size_t t_max() const { return values_.size(); }

  // log V_n(t), t in [1, t_max].
  double at(std::size_t t) const { return values_.at(t - 1); }

  LogVnTable extended(std::size_t new_t_max) const {
    return LogVnTable(n_, new_t_max, cfg_);
  }

 private:
  std::size_t n_;
  MfmConfig cfg_;
  std::vector<double> values_;
};

}  // namespace nhpp

#endif
