#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gpsel/model.hpp"

namespace gpsel {

struct PosteriorSample {
  std::vector<double> theta;
  double loglike = 0.0;
  double logweight = 0.0;  // normalized posterior log-importance-weight
};

struct EvidenceEstimate {
  double logz = 0.0;
  double error_bar = 0.0;  // 0 for quadrature
  long sample_count = 0;
  std::string method;
  std::vector<PosteriorSample> samples;  // nested sampling only
  bool partial = false;                  // aborted run (stagnation/cap)
};

// Likelihood hook: log p(y | X, theta_raw). The prior factor is added
// internally by both oracles.
using LogLikeFn = std::function<double(const std::vector<double>&)>;

// Trapezoidal tensor-grid integration of likelihood x prior over the box
// prior mean +- half_width_sigmas * sigma, accumulated by log-sum-exp in a
// fixed order (term evaluation may run in parallel; the reduction is serial,
// so results are bit-identical across thread counts). Requires u <= 3 and
// points_per_dim >= 51.
EvidenceEstimate quadrature_evidence_fn(const LogLikeFn& loglike,
                                        const PriorSpec& prior,
                                        int points_per_dim,
                                        double half_width_sigmas,
                                        bool parallel = true);
EvidenceEstimate quadrature_evidence(const GPModel& model,
                                     const PriorSpec& prior,
                                     const Dataset& data,
                                     int points_per_dim = 401,
                                     double half_width_sigmas = 6.0);

// Classic nested sampling: live set drawn from the prior; the worst point is
// replaced by a constrained prior draw obtained via a random-walk Metropolis
// chain (25 steps, per-dimension prior-scaled step, adapted towards ~40%
// acceptance) started from a random surviving live point. logZ accumulates
// the standard shrinkage weights; stops when the estimated remaining evidence
// is below dlogz_stop; error bar = sqrt(H_info / live_points). The sample list
// holds all dead points plus the final live set (in that order) with their
// normalized posterior weights. Stagnation (no acceptance over 50 consecutive
// iterations) aborts with partial=true.
EvidenceEstimate nested_sampling_evidence_fn(const LogLikeFn& loglike,
                                             const PriorSpec& prior,
                                             int live_points, double dlogz_stop,
                                             std::uint64_t seed);
EvidenceEstimate nested_sampling_evidence(const GPModel& model,
                                          const PriorSpec& prior,
                                          const Dataset& data,
                                          int live_points = 400,
                                          double dlogz_stop = 0.01,
                                          std::uint64_t seed = 0);

// Posterior samples as CSV: one raw-theta column per dimension, then
// log-likelihood and normalized weight.
void write_samples_csv(const EvidenceEstimate& est, const std::string& path);

}  // namespace gpsel
