#include "gpsel/model.hpp"

#include <cmath>
#include <map>
#include <string>

#include "gpsel/errors.hpp"
#include "gpsel/numerics.hpp"

namespace gpsel {

// ---------------------------------------------------------------------------
// Priors

namespace {

struct PriorRow {
  double mean, stdev;
};

// Raw-value prior table; keys are (base, role).
PriorRow prior_row(Base b, const std::string& role) {
  static const PriorRow kScale{-1.63, 2.26};
  static const PriorRow kNoise{-3.52, 3.58};
  static const PriorRow kSeLen{-0.212, 1.89};
  static const PriorRow kPerPeriod{0.65, 1.0};
  static const PriorRow kRqLen{-0.05, 1.94};
  static const PriorRow kRqAlpha{1.88, 3.1};
  if (role == "scale") return kScale;
  if (role == "noise") return kNoise;
  switch (b) {
    case Base::SE: return kSeLen;
    case Base::MAT32: return {0.8, 2.15};
    case Base::LIN: return {-0.8, 1.0};
    case Base::PER:
      return role == "period" ? kPerPeriod : PriorRow{0.78, 2.29};
    case Base::RQ: return role == "alpha" ? kRqAlpha : kRqLen;
    case Base::K1: return kSeLen;                                 // lengthscale
    case Base::K2: return role == "period" ? kPerPeriod : kSeLen; // lengthscales -> SE row
    case Base::K3: return role == "alpha" ? kRqAlpha : kRqLen;
    case Base::K4: return kSeLen;  // lengthscale ("noise"/"scale" handled above)
  }
  throw ConfigError("no prior row for role '" + role + "'");
}

}  // namespace

PriorSpec build_prior(const ExprPtr& expr) {
  const Layout layout = param_layout(expr);
  PriorSpec prior;
  prior.mean.reserve(layout.u());
  prior.stdev.reserve(layout.u());
  for (const ParamInfo& p : layout.entries) {
    const PriorRow row =
        p.leaf_index < 0 ? PriorRow{-3.52, 3.58} : prior_row(p.base, p.role);
    prior.mean.push_back(row.mean);
    prior.stdev.push_back(row.stdev);
  }
  return prior;
}

// ---------------------------------------------------------------------------
// Gram assembly: serial reference + OpenMP row-partitioned version. Entries
// are written independently and mirrored, so thread count cannot change bits.

void gram_matrix_serial(const ExprPtr& expr, const double* kernel_raw,
                        const std::vector<double>& x, Eigen::MatrixXd& K) {
  const int n = static_cast<int>(x.size());
  K.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = eval_kernel(expr, kernel_raw, x[i], x[j]);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
}

void gram_matrix_parallel(const ExprPtr& expr, const double* kernel_raw,
                          const std::vector<double>& x, Eigen::MatrixXd& K) {
  const int n = static_cast<int>(x.size());
  K.resize(n, n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = eval_kernel(expr, kernel_raw, x[i], x[j]);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
}

void gram_matrix(const ExprPtr& expr, const double* kernel_raw,
                 const std::vector<double>& x, Eigen::MatrixXd& K) {
#ifdef _OPENMP
  gram_matrix_parallel(expr, kernel_raw, x, K);
#else
  gram_matrix_serial(expr, kernel_raw, x, K);
#endif
}

namespace {

inline void gram_grads_row(const ExprPtr& expr, const double* kernel_raw,
                           const std::vector<double>& x, int i, int uk,
                           Eigen::MatrixXd& K, std::vector<Eigen::MatrixXd>& dK,
                           double* gbuf) {
  const int n = static_cast<int>(x.size());
  for (int j = i; j < n; ++j) {
    const double v = eval_kernel_grad(expr, kernel_raw, x[i], x[j], gbuf);
    K(i, j) = v;
    K(j, i) = v;
    for (int p = 0; p < uk; ++p) {
      dK[p](i, j) = gbuf[p];
      dK[p](j, i) = gbuf[p];
    }
  }
}

}  // namespace

void gram_with_grads_serial(const ExprPtr& expr, const double* kernel_raw,
                            const std::vector<double>& x, Eigen::MatrixXd& K,
                            std::vector<Eigen::MatrixXd>& dK) {
  const int n = static_cast<int>(x.size());
  const int uk = param_layout(expr).kernel_params();
  K.resize(n, n);
  dK.assign(uk, Eigen::MatrixXd(n, n));
  std::vector<double> gbuf(uk);
  for (int i = 0; i < n; ++i) {
    gram_grads_row(expr, kernel_raw, x, i, uk, K, dK, gbuf.data());
  }
}

void gram_with_grads_parallel(const ExprPtr& expr, const double* kernel_raw,
                              const std::vector<double>& x, Eigen::MatrixXd& K,
                              std::vector<Eigen::MatrixXd>& dK) {
  const int n = static_cast<int>(x.size());
  const int uk = param_layout(expr).kernel_params();
  K.resize(n, n);
  dK.assign(uk, Eigen::MatrixXd(n, n));
#pragma omp parallel
  {
    std::vector<double> gbuf(uk);
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      gram_grads_row(expr, kernel_raw, x, i, uk, K, dK, gbuf.data());
    }
  }
}

void gram_with_grads(const ExprPtr& expr, const double* kernel_raw,
                     const std::vector<double>& x, Eigen::MatrixXd& K,
                     std::vector<Eigen::MatrixXd>& dK) {
#ifdef _OPENMP
  gram_with_grads_parallel(expr, kernel_raw, x, K, dK);
#else
  gram_with_grads_serial(expr, kernel_raw, x, K, dK);
#endif
}

// ---------------------------------------------------------------------------
// Likelihood

namespace {

// Factorize M = K + noise I (+ escalating jitter); throws after 4 escalations.
Eigen::LLT<Eigen::MatrixXd> factorize(const GPModel& model, Eigen::MatrixXd& M,
                                      MllDiag* diag) {
  const double diag_mean = M.diagonal().mean();
  double jitter = model.jitter * diag_mean;
  for (int attempt = 0; attempt <= 4; ++attempt) {
    Eigen::MatrixXd Mj = M;
    Mj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Mj);
    if (llt.info() == Eigen::Success &&
        std::isfinite(llt.matrixLLT().diagonal().minCoeff())) {
      if (diag) {
        diag->jitter_escalations = attempt;
        diag->jitter_used = jitter;
      }
      M = Mj;
      return llt;
    }
    jitter *= 10.0;
  }
  throw NumericalError("Gram matrix not PSD after jitter escalation");
}

void check_raw(const ExprPtr& expr, const std::vector<double>& raw) {
  const Layout layout = param_layout(expr);
  if (static_cast<int>(raw.size()) != layout.u()) {
    throw ConfigError("raw parameter vector has length " +
                      std::to_string(raw.size()) + ", layout expects " +
                      std::to_string(layout.u()));
  }
}

double mll_impl(const GPModel& model, const std::vector<double>& raw,
                const Dataset& data, MllDiag* diag) {
  check_raw(model.expr, raw);
  const Layout layout = param_layout(model.expr);
  const int n = data.n();
  Eigen::MatrixXd M;
  gram_matrix(model.expr, raw.data(), data.x, M);
  if (!layout.provides_noise) M.diagonal().array() += softplus(raw.back());

  Eigen::LLT<Eigen::MatrixXd> llt = factorize(model, M, diag);
  Eigen::Map<const Eigen::VectorXd> y(data.y.data(), n);
  Eigen::VectorXd alpha = llt.solve(y);
  const double logdet =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - 0.5 * logdet - 0.5 * n * std::log(2.0 * M_PI);
}

}  // namespace

double log_mll(const GPModel& model, const std::vector<double>& raw,
               const Dataset& data, MllDiag* diag) {
  return mll_impl(model, raw, data, diag);
}

double log_mll_grad(const GPModel& model, const std::vector<double>& raw,
                    const Dataset& data, std::vector<double>& grad,
                    MllDiag* diag) {
  check_raw(model.expr, raw);
  const Layout layout = param_layout(model.expr);
  const int n = data.n();
  const int uk = layout.kernel_params();

  Eigen::MatrixXd M;
  std::vector<Eigen::MatrixXd> dK;
  gram_with_grads(model.expr, raw.data(), data.x, M, dK);
  if (!layout.provides_noise) M.diagonal().array() += softplus(raw.back());

  Eigen::LLT<Eigen::MatrixXd> llt = factorize(model, M, diag);
  Eigen::Map<const Eigen::VectorXd> y(data.y.data(), n);
  Eigen::VectorXd alpha = llt.solve(y);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double value =
      -0.5 * y.dot(alpha) - 0.5 * logdet - 0.5 * n * std::log(2.0 * M_PI);

  // A = alpha alpha^T - M^-1; d logML/dp = 1/2 sum(A .* dM/dp)
  Eigen::MatrixXd A = -llt.solve(Eigen::MatrixXd::Identity(n, n));
  A.noalias() += alpha * alpha.transpose();

  grad.assign(layout.u(), 0.0);
  for (int p = 0; p < uk; ++p) {
    grad[p] = 0.5 * A.cwiseProduct(dK[p]).sum();
  }
  if (!layout.provides_noise) {
    grad[layout.u() - 1] = 0.5 * A.trace() * sigmoid(raw.back());
  }
  return value;
}

double log_prior(const PriorSpec& prior, const std::vector<double>& raw) {
  if (raw.size() != prior.mean.size()) {
    throw ConfigError("prior/parameter dimension mismatch");
  }
  double lp = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    lp += log_normal_pdf(raw[i], prior.mean[i], prior.stdev[i]);
  }
  return lp;
}

void log_prior_grad(const PriorSpec& prior, const std::vector<double>& raw,
                    std::vector<double>& grad) {
  grad.assign(raw.size(), 0.0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    grad[i] = -(raw[i] - prior.mean[i]) / (prior.stdev[i] * prior.stdev[i]);
  }
}

double log_map(const GPModel& model, const PriorSpec& prior,
               const std::vector<double>& raw, const Dataset& data,
               MllDiag* diag) {
  return log_mll(model, raw, data, diag) + log_prior(prior, raw);
}

double test_log_likelihood(const GPModel& model, const std::vector<double>& raw,
                           const Dataset& test_data) {
  return log_mll(model, raw, test_data);
}

}  // namespace gpsel
