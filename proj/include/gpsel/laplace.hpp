#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gpsel/fit.hpp"
#include "gpsel/model.hpp"

namespace gpsel {

struct HessianSpectrum {
  Eigen::MatrixXd H;            // symmetrized -grad grad log(p(y|X,th) p(th))
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors; // orthonormal columns, matching order
  int u() const { return static_cast<int>(eigenvalues.size()); }
};

// Central second differences (h_i = 1e-4 * max(1, |theta_i|)) of -f,
// symmetrized, eigendecomposed. f must be pure; stencil evaluations run in
// parallel. Throws NumericalError naming the index pair on non-finite entries.
HessianSpectrum hessian_of(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& theta,
                           bool parallel = true);

// Hessian of the MAP objective at theta_hat.
HessianSpectrum hessian_at(const GPModel& model, const PriorSpec& prior,
                           const Dataset& data,
                           const std::vector<double>& theta_hat);

// lambda' = max(lambda, exp(-2r) * 2pi); negative and near-zero eigenvalues
// are clamped like any other. H is rebuilt from the clamped spectrum.
HessianSpectrum clamp_eigenvalues(const HessianSpectrum& spectrum, double r,
                                  int* clamped_count = nullptr);

enum class LaplaceVariant { Lap, LapS, LapAIC, LapBIC };

// map_value + (u/2) log 2pi - 1/2 sum log lambda_i' with the variant's clamp
// (Lap: none, LapS: r=0, LapAIC: r=-1, LapBIC: r=-log n). Plain Lap returns
// nullopt when any eigenvalue is <= 0 (evidence undefined).
std::optional<double> log_evidence_laplace(double map_value,
                                           const HessianSpectrum& spectrum,
                                           LaplaceVariant variant, int n);

struct EvaluationResult {
  int u = 0, n = 0;
  double mll = 0.0;        // optimized marginal log likelihood (L-hat)
  double map_value = 0.0;  // optimized log_mll + log_prior (L-hat_MAP)
  double aic = 0.0, bic = 0.0;          // information criteria at the MLL optimum
  double logz_aic = 0.0, logz_bic = 0.0;  // -AIC/2, -BIC/2
  // Same information criteria evaluated at the MAP optimum instead.
  double aic_map_surrogate = 0.0, bic_map_surrogate = 0.0;
  std::optional<double> logz_lap;  // nullopt = undefined (nonpositive eigenvalue)
  double logz_laps = 0.0, logz_lapaic = 0.0, logz_lapbic = 0.0;
  HessianSpectrum spectrum;        // at the MAP optimum
  int clamped_laps = 0, clamped_lapaic = 0, clamped_lapbic = 0;
  FitResult mll_fit, map_fit;
  MllDiag diag;                    // jitter provenance at the MAP optimum
};

// Runs both fits (MLL objective for MLL/AIC/BIC, MAP objective for the
// Laplace family), the Hessian, and every criterion.
EvaluationResult criteria_suite(const GPModel& model, const PriorSpec& prior,
                                const Dataset& data, std::uint64_t seed,
                                int restarts, int max_iters = 1000);

struct EllipseSpec {
  std::array<double, 2> center{};
  Eigen::Matrix2d axes;                    // principal axes as columns
  std::array<double, 2> semi_axis_lengths{};  // sigma_level / sqrt(lambda_i')
  double level = 2.0;
};

// 2-D confidence ellipse of N(theta_hat, H'^-1); requires u = 2.
EllipseSpec confidence_ellipse(const std::vector<double>& theta_hat,
                               const HessianSpectrum& clamped,
                               double sigma_level);

}  // namespace gpsel
