#include "gpsel/laplace.hpp"

#include <cmath>
#include <string>

#include "gpsel/errors.hpp"
#include "gpsel/rng.hpp"

namespace gpsel {

HessianSpectrum hessian_of(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& theta, bool parallel) {
  const int u = static_cast<int>(theta.size());
  std::vector<double> h(u);
  for (int i = 0; i < u; ++i) h[i] = 1e-4 * std::max(1.0, std::abs(theta[i]));

  // Stencil: f0, per-i pairs, and 4-point cross terms for i<j. Points are
  // evaluated into independent slots; the combination below is serial and
  // order-fixed, so thread count cannot change the result.
  std::vector<std::vector<double>> pts;
  pts.push_back(theta);
  for (int i = 0; i < u; ++i) {
    auto tp = theta; tp[i] += h[i]; pts.push_back(tp);
    auto tm = theta; tm[i] -= h[i]; pts.push_back(tm);
  }
  std::vector<std::pair<int, int>> cross;
  for (int i = 0; i < u; ++i) {
    for (int j = i + 1; j < u; ++j) {
      cross.emplace_back(i, j);
      for (int si : {+1, -1}) {
        for (int sj : {+1, -1}) {
          auto t = theta;
          t[i] += si * h[i];
          t[j] += sj * h[j];
          pts.push_back(std::move(t));
        }
      }
    }
  }

  std::vector<double> vals(pts.size());
  const int npts = static_cast<int>(pts.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < npts; ++k) vals[k] = f(pts[k]);
  } else {
    for (int k = 0; k < npts; ++k) vals[k] = f(pts[k]);
  }

  const double f0 = vals[0];
  Eigen::MatrixXd H(u, u);
  for (int i = 0; i < u; ++i) {
    const double fp = vals[1 + 2 * i], fm = vals[2 + 2 * i];
    H(i, i) = -(fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    if (!std::isfinite(H(i, i))) {
      throw NumericalError("non-finite second difference at (" +
                           std::to_string(i) + "," + std::to_string(i) + ")");
    }
  }
  std::size_t base = 1 + 2 * static_cast<std::size_t>(u);
  for (std::size_t c = 0; c < cross.size(); ++c) {
    const auto [i, j] = cross[c];
    const double fpp = vals[base + 4 * c + 0];
    const double fpm = vals[base + 4 * c + 1];
    const double fmp = vals[base + 4 * c + 2];
    const double fmm = vals[base + 4 * c + 3];
    const double v = -(fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite second difference at (" +
                           std::to_string(i) + "," + std::to_string(j) + ")");
    }
    H(i, j) = v;
    H(j, i) = v;
  }
  // finite differences break exact symmetry; symmetrize before decomposing
  H = 0.5 * (H + H.transpose()).eval();

  HessianSpectrum s;
  s.H = H;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) {
    throw NumericalError("Hessian eigendecomposition failed");
  }
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  return s;
}

HessianSpectrum hessian_at(const GPModel& model, const PriorSpec& prior,
                           const Dataset& data,
                           const std::vector<double>& theta_hat) {
  auto f = [&](const std::vector<double>& th) {
    return log_map(model, prior, th, data);
  };
  return hessian_of(f, theta_hat);
}

HessianSpectrum clamp_eigenvalues(const HessianSpectrum& spectrum, double r,
                                  int* clamped_count) {
  const double threshold = std::exp(-2.0 * r) * 2.0 * M_PI;
  HessianSpectrum out = spectrum;
  int count = 0;
  for (int i = 0; i < out.u(); ++i) {
    if (out.eigenvalues[i] < threshold) {
      out.eigenvalues[i] = threshold;
      ++count;
    }
  }
  out.H = out.eigenvectors * out.eigenvalues.asDiagonal() *
          out.eigenvectors.transpose();
  if (clamped_count) *clamped_count = count;
  return out;
}

std::optional<double> log_evidence_laplace(double map_value,
                                           const HessianSpectrum& spectrum,
                                           LaplaceVariant variant, int n) {
  const int u = spectrum.u();
  Eigen::VectorXd lam = spectrum.eigenvalues;
  if (variant == LaplaceVariant::Lap) {
    if ((lam.array() <= 0.0).any()) return std::nullopt;  // |H| term undefined
  } else {
    const double r = variant == LaplaceVariant::LapS ? 0.0
                     : variant == LaplaceVariant::LapAIC
                         ? -1.0
                         : -std::log(static_cast<double>(n));
    const HessianSpectrum clamped = clamp_eigenvalues(spectrum, r);
    lam = clamped.eigenvalues;
  }
  const double half_logdet = 0.5 * lam.array().log().sum();
  return map_value + 0.5 * u * std::log(2.0 * M_PI) - half_logdet;
}

EvaluationResult criteria_suite(const GPModel& model, const PriorSpec& prior,
                                const Dataset& data, std::uint64_t seed,
                                int restarts, int max_iters) {
  EvaluationResult res;
  res.n = data.n();
  res.u = prior.u();
  const double logn = std::log(static_cast<double>(res.n));

  res.mll_fit = optimize(model, prior, data, Objective::MLL, restarts,
                         max_iters, Rng::derive(seed, 101));
  res.map_fit = optimize(model, prior, data, Objective::MAP, restarts,
                         max_iters, Rng::derive(seed, 202));

  res.mll = res.mll_fit.value;
  res.map_value = res.map_fit.value;
  res.aic = 2.0 * res.u - 2.0 * res.mll;
  res.bic = res.u * logn - 2.0 * res.mll;
  res.logz_aic = -0.5 * res.aic;
  res.logz_bic = -0.5 * res.bic;
  res.aic_map_surrogate = 2.0 * res.u - 2.0 * res.map_value;
  res.bic_map_surrogate = res.u * logn - 2.0 * res.map_value;

  // refresh jitter provenance at the MAP optimum
  log_map(model, prior, res.map_fit.theta_hat, data, &res.diag);

  res.spectrum = hessian_at(model, prior, data, res.map_fit.theta_hat);
  clamp_eigenvalues(res.spectrum, 0.0, &res.clamped_laps);
  clamp_eigenvalues(res.spectrum, -1.0, &res.clamped_lapaic);
  clamp_eigenvalues(res.spectrum, -logn, &res.clamped_lapbic);

  res.logz_lap = log_evidence_laplace(res.map_value, res.spectrum,
                                      LaplaceVariant::Lap, res.n);
  res.logz_laps = *log_evidence_laplace(res.map_value, res.spectrum,
                                        LaplaceVariant::LapS, res.n);
  res.logz_lapaic = *log_evidence_laplace(res.map_value, res.spectrum,
                                          LaplaceVariant::LapAIC, res.n);
  res.logz_lapbic = *log_evidence_laplace(res.map_value, res.spectrum,
                                          LaplaceVariant::LapBIC, res.n);
  return res;
}

EllipseSpec confidence_ellipse(const std::vector<double>& theta_hat,
                               const HessianSpectrum& clamped,
                               double sigma_level) {
  if (clamped.u() != 2 || theta_hat.size() != 2) {
    throw ConfigError("confidence ellipse export requires exactly 2 hyperparameters");
  }
  EllipseSpec e;
  e.center = {theta_hat[0], theta_hat[1]};
  e.axes = clamped.eigenvectors;
  e.level = sigma_level;
  for (int i = 0; i < 2; ++i) {
    if (!(clamped.eigenvalues[i] > 0.0)) {
      throw NumericalError("ellipse needs a positive-definite (clamped) Hessian");
    }
    e.semi_axis_lengths[i] = sigma_level / std::sqrt(clamped.eigenvalues[i]);
  }
  return e;
}

}  // namespace gpsel
