#include "gpsel/fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "gpsel/errors.hpp"
#include "gpsel/rng.hpp"

namespace gpsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> fd_gradient(const ObjFn& f, const std::vector<double>& x) {
  const int u = static_cast<int>(x.size());
  std::vector<double> g(u), xp = x;
  for (int i = 0; i < u; ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

FitResult maximize_bfgs(const ObjFn& f, const GradFn& grad,
                        const std::vector<double>& init, int max_iters,
                        double grad_tol) {
  const int u = static_cast<int>(init.size());
  auto gradient = [&](const std::vector<double>& x) {
    return grad ? grad(x) : fd_gradient(f, x);
  };

  FitResult res;
  res.theta_hat = init;
  double fx = f(init);
  if (!std::isfinite(fx)) {
    res.value = -kInf;
    return res;
  }

  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(init.data(), u);
  std::vector<double> xv = init;
  std::vector<double> gv = gradient(xv);
  Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(gv.data(), u);
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(u, u);

  int iter = 0;
  for (; iter < max_iters; ++iter) {
    if (inf_norm(g) < grad_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd d = Hinv * g;  // ascent direction candidate
    double dir = d.dot(g);
    if (!(dir > 0.0) || !d.allFinite()) {
      Hinv.setIdentity();
      d = g;
      dir = d.dot(g);
      if (!(dir > 0.0)) break;  // zero gradient handled above; bail out
    }

    // Armijo backtracking; non-finite trials shrink the step as well.
    const double c1 = 1e-4;
    double t = 1.0;
    double fnew = -kInf;
    Eigen::VectorXd xnew;
    bool accepted = false;
    while (t >= 1e-20) {
      xnew = x + t * d;
      std::vector<double> xtv(xnew.data(), xnew.data() + u);
      fnew = f(xtv);
      if (std::isfinite(fnew) && fnew >= fx + c1 * t * dir) {
        accepted = true;
        xv = std::move(xtv);
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // line search exhausted: treat current x as final

    std::vector<double> gnewv = gradient(xv);
    Eigen::VectorXd gnew = Eigen::Map<const Eigen::VectorXd>(gnewv.data(), u);

    // BFGS update in minimization convention (phi = -f): yk = -(gnew - g).
    Eigen::VectorXd s = xnew - x;
    Eigen::VectorXd yk = -(gnew - g);
    const double sy = s.dot(yk);
    if (sy > 1e-12 * s.norm() * yk.norm() && yk.allFinite()) {
      const double rho = 1.0 / sy;
      Eigen::MatrixXd I = Eigen::MatrixXd::Identity(u, u);
      Hinv = (I - rho * s * yk.transpose()) * Hinv *
                 (I - rho * yk * s.transpose()) +
             rho * s * s.transpose();
    } else {
      Hinv.setIdentity();
    }
    x = xnew;
    fx = fnew;
    g = gnew;
  }

  res.theta_hat.assign(x.data(), x.data() + u);
  res.value = fx;
  res.iterations = iter;
  res.grad_norm = inf_norm(g);
  if (res.grad_norm < grad_tol) res.converged = true;
  return res;
}

std::vector<double> init_random(const PriorSpec& prior, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> raw(prior.u());
  for (int i = 0; i < prior.u(); ++i) {
    raw[i] = prior.mean[i] + prior.stdev[i] * rng.normal();
  }
  return raw;
}

FitResult optimize(const GPModel& model, const PriorSpec& prior,
                   const Dataset& data, Objective objective, int restarts,
                   int max_iters, std::uint64_t seed) {
  if (restarts < 1) throw ConfigError("optimize needs restarts >= 1");

  ObjFn f = [&](const std::vector<double>& raw) {
    try {
      return objective == Objective::MLL ? log_mll(model, raw, data)
                                         : log_map(model, prior, raw, data);
    } catch (const NumericalError&) {
      return -kInf;  // line search treats the region as infeasible
    }
  };
  GradFn grad = [&](const std::vector<double>& raw) {
    std::vector<double> g;
    try {
      log_mll_grad(model, raw, data, g);
    } catch (const NumericalError&) {
      g.assign(raw.size(), 0.0);
      return g;
    }
    if (objective == Objective::MAP) {
      std::vector<double> gp;
      log_prior_grad(prior, raw, gp);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gp[i];
    }
    return g;
  };

  FitResult best;
  best.value = -kInf;
  bool any = false;
  for (int k = 0; k <= restarts; ++k) {
    const std::vector<double> init =
        k == 0 ? prior.mean : init_random(prior, Rng::derive(seed, k));
    FitResult r = maximize_bfgs(f, grad, init, max_iters);
    r.restart_index = k;
    if (!std::isfinite(r.value)) continue;  // never attained a finite objective
    if (!any || r.value > best.value) {
      best = r;
      any = true;
    }
  }
  if (!any) {
    throw NumericalError("optimization failed: no restart reached a finite objective");
  }
  return best;
}

}  // namespace gpsel
