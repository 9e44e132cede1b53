#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gpsel/model.hpp"

namespace gpsel {

struct FitResult {
  std::vector<double> theta_hat;
  double value = 0.0;       // best objective value (maximization convention)
  int restart_index = -1;   // 0 = prior-means init, 1..R = random inits
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;   // inf-norm at the returned point
};

enum class Objective { MLL, MAP };

using ObjFn = std::function<double(const std::vector<double>&)>;
// Returns the gradient; pass nullptr-like empty function to fall back to
// central finite differences (h = 1e-5 * max(1, |x_i|)).
using GradFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Single-start BFGS with Armijo backtracking, maximizing f. Non-finite trial
// values during the line search shrink the step; an init with non-finite f
// yields converged=false and value=-inf. Exposed as a test hook.
FitResult maximize_bfgs(const ObjFn& f, const GradFn& grad,
                        const std::vector<double>& init, int max_iters,
                        double grad_tol = 1e-6);

// Prior draw of a raw parameter vector; deterministic per seed.
std::vector<double> init_random(const PriorSpec& prior, std::uint64_t seed);

// Multi-restart optimization of MLL or MAP: one init at the prior means plus
// `restarts` prior draws (restart k seeded derive(seed, k)), merged by
// deterministic argmax with lowest-restart-index tie-break. Throws
// NumericalError if every restart fails to reach a finite objective.
FitResult optimize(const GPModel& model, const PriorSpec& prior,
                   const Dataset& data, Objective objective, int restarts,
                   int max_iters, std::uint64_t seed);

}  // namespace gpsel
