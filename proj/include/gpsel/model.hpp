#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gpsel/data.hpp"
#include "gpsel/kernels.hpp"

namespace gpsel {

// Zero-mean GP with a compositional kernel; jitter is the starting relative
// diagonal boost used when the Gram matrix is not numerically PSD.
struct GPModel {
  ExprPtr expr;
  double jitter = 1e-8;
};

// Independent normal prior per raw hyperparameter.
struct PriorSpec {
  std::vector<double> mean, stdev;
  int u() const { return static_cast<int>(mean.size()); }
};

// Per-parameter Gaussian prior rows assembled along the kernel's layout.
PriorSpec build_prior(const ExprPtr& expr);

// Gram-matrix assembly from raw kernel parameters (kernel part only; noise is
// added by the caller). The parallel version partitions rows across OpenMP
// threads; each entry is computed independently, so serial and parallel
// results are bit-identical. The serial version is the reference kept for
// testing and for builds without OpenMP.
void gram_matrix_serial(const ExprPtr& expr, const double* kernel_raw,
                        const std::vector<double>& x, Eigen::MatrixXd& K);
void gram_matrix_parallel(const ExprPtr& expr, const double* kernel_raw,
                          const std::vector<double>& x, Eigen::MatrixXd& K);
void gram_matrix(const ExprPtr& expr, const double* kernel_raw,
                 const std::vector<double>& x, Eigen::MatrixXd& K);

// Gram matrix plus per-raw-parameter derivative matrices dK[j] (kernel part).
void gram_with_grads_serial(const ExprPtr& expr, const double* kernel_raw,
                            const std::vector<double>& x, Eigen::MatrixXd& K,
                            std::vector<Eigen::MatrixXd>& dK);
void gram_with_grads_parallel(const ExprPtr& expr, const double* kernel_raw,
                              const std::vector<double>& x, Eigen::MatrixXd& K,
                              std::vector<Eigen::MatrixXd>& dK);
void gram_with_grads(const ExprPtr& expr, const double* kernel_raw,
                     const std::vector<double>& x, Eigen::MatrixXd& K,
                     std::vector<Eigen::MatrixXd>& dK);

struct MllDiag {
  int jitter_escalations = 0;
  double jitter_used = 0.0;
};

// Marginal log likelihood, Cholesky route:
//   -1/2 y^T M^-1 y - 1/2 log|M| - n/2 log 2pi,  M = K + noise I + jitter I.
// The constrained noise value softplus(raw_noise) is the noise VARIANCE added
// to the diagonal. Jitter starts at model.jitter * mean(diag M) and escalates
// x10 up to 4 times before a NumericalError is thrown.
double log_mll(const GPModel& model, const std::vector<double>& raw,
               const Dataset& data, MllDiag* diag = nullptr);

// Value plus analytic gradient w.r.t. all raw parameters (trace identity
// d logML = 1/2 tr((aa^T - M^-1) dM), a = M^-1 y).
double log_mll_grad(const GPModel& model, const std::vector<double>& raw,
                    const Dataset& data, std::vector<double>& grad,
                    MllDiag* diag = nullptr);

double log_prior(const PriorSpec& prior, const std::vector<double>& raw);
void log_prior_grad(const PriorSpec& prior, const std::vector<double>& raw,
                    std::vector<double>& grad);

// log p(y|X,theta) + log p(theta): the MAP objective.
double log_map(const GPModel& model, const PriorSpec& prior,
               const std::vector<double>& raw, const Dataset& data,
               MllDiag* diag = nullptr);

// Eq.-(1) likelihood on substituted data at unchanged fitted parameters (not
// the posterior predictive).
double test_log_likelihood(const GPModel& model, const std::vector<double>& raw,
                           const Dataset& test_data);

}  // namespace gpsel
