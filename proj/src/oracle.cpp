#include "gpsel/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "gpsel/errors.hpp"
#include "gpsel/numerics.hpp"
#include "gpsel/rng.hpp"

namespace gpsel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double prior_logpdf(const PriorSpec& prior, const std::vector<double>& th) {
  double lp = 0.0;
  for (int i = 0; i < prior.u(); ++i) {
    lp += log_normal_pdf(th[i], prior.mean[i], prior.stdev[i]);
  }
  return lp;
}

}  // namespace

EvidenceEstimate quadrature_evidence_fn(const LogLikeFn& loglike,
                                        const PriorSpec& prior,
                                        int points_per_dim,
                                        double half_width_sigmas,
                                        bool parallel) {
  const int u = prior.u();
  if (u > 3) {
    throw ConfigError("quadrature oracle supports at most 3 hyperparameters, got " +
                      std::to_string(u));
  }
  if (points_per_dim < 51) throw ConfigError("quadrature needs points_per_dim >= 51");

  std::vector<double> lo(u), step(u);
  for (int d = 0; d < u; ++d) {
    lo[d] = prior.mean[d] - half_width_sigmas * prior.stdev[d];
    step[d] = 2.0 * half_width_sigmas * prior.stdev[d] / (points_per_dim - 1);
  }
  long total = 1;
  for (int d = 0; d < u; ++d) total *= points_per_dim;

  // log integrand per grid node, including trapezoid endpoint half-weights
  std::vector<double> terms(total);
  auto eval_term = [&](long idx) {
    std::vector<double> th(u);
    double logw = 0.0;
    long rem = idx;
    for (int d = 0; d < u; ++d) {
      const int k = static_cast<int>(rem % points_per_dim);
      rem /= points_per_dim;
      th[d] = lo[d] + k * step[d];
      if (k == 0 || k == points_per_dim - 1) logw += std::log(0.5);
    }
    terms[idx] = loglike(th) + prior_logpdf(prior, th) + logw;
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < total; ++idx) eval_term(idx);
  } else {
    for (long idx = 0; idx < total; ++idx) eval_term(idx);
  }

  // fixed-order log-sum-exp reduction
  double m = kNegInf;
  for (long idx = 0; idx < total; ++idx) m = std::max(m, terms[idx]);
  if (!std::isfinite(m)) throw NumericalError("quadrature: integrand vanished everywhere");
  double acc = 0.0;
  for (long idx = 0; idx < total; ++idx) acc += std::exp(terms[idx] - m);
  double logz = m + std::log(acc);
  for (int d = 0; d < u; ++d) logz += std::log(step[d]);

  EvidenceEstimate est;
  est.logz = logz;
  est.error_bar = 0.0;
  est.sample_count = total;
  est.method = "quadrature";
  return est;
}

EvidenceEstimate quadrature_evidence(const GPModel& model,
                                     const PriorSpec& prior,
                                     const Dataset& data, int points_per_dim,
                                     double half_width_sigmas) {
  LogLikeFn ll = [&](const std::vector<double>& th) {
    try {
      return log_mll(model, th, data);
    } catch (const NumericalError&) {
      return kNegInf;
    }
  };
  return quadrature_evidence_fn(ll, prior, points_per_dim, half_width_sigmas);
}

EvidenceEstimate nested_sampling_evidence_fn(const LogLikeFn& loglike,
                                             const PriorSpec& prior,
                                             int live_points, double dlogz_stop,
                                             std::uint64_t seed) {
  if (live_points < 50) throw ConfigError("nested sampling needs live_points >= 50");
  const int u = prior.u();
  const int nlive = live_points;
  const long max_iters = 200000;
  Rng rng(seed);

  std::vector<std::vector<double>> live(nlive, std::vector<double>(u));
  std::vector<double> liveL(nlive);
  for (int i = 0; i < nlive; ++i) {
    for (int d = 0; d < u; ++d) {
      live[i][d] = prior.mean[d] + prior.stdev[d] * rng.normal();
    }
    liveL[i] = loglike(live[i]);
  }

  EvidenceEstimate est;
  est.method = "nested";
  std::vector<double> dead_logw_raw;  // shrinkage weight ln w_i (prior mass)

  double logz = kNegInf;
  double log_x_prev = 0.0;
  const double log_shrink = -1.0 / nlive;
  // ln(e^{-(i-1)/N} - e^{-i/N}) = ln X_{i-1} + ln(1 - e^{-1/N})
  const double log_shell = std::log(-std::expm1(log_shrink));

  double walk_step = 1.0;
  const int walk_len = 25;
  int stagnant = 0;
  long it = 0;
  bool aborted = false;

  while (true) {
    ++it;
    int worst = 0;
    for (int i = 1; i < nlive; ++i) {
      if (liveL[i] < liveL[worst]) worst = i;
    }
    const double lstar = liveL[worst];
    const double logw = log_x_prev + log_shell;
    logz = logaddexp(logz, logw + lstar);

    PosteriorSample s;
    s.theta = live[worst];
    s.loglike = lstar;
    est.samples.push_back(std::move(s));
    dead_logw_raw.push_back(logw);

    const double log_x = -static_cast<double>(it) / nlive;
    log_x_prev = log_x;

    // replace the worst point: prior-Metropolis walk constrained to L > L*
    int start = worst;
    if (nlive > 1) {
      do {
        start = static_cast<int>(rng.next_u64() % nlive);
      } while (start == worst);
    }
    std::vector<double> cur = live[start];
    double cur_logp = prior_logpdf(prior, cur);
    double cur_L = liveL[start];
    int accepted = 0;
    std::vector<double> prop(u);
    for (int stepi = 0; stepi < walk_len; ++stepi) {
      for (int d = 0; d < u; ++d) {
        prop[d] = cur[d] + walk_step * prior.stdev[d] * rng.normal();
      }
      const double prop_L = loglike(prop);
      if (prop_L > lstar) {
        const double prop_logp = prior_logpdf(prior, prop);
        if (std::log(1.0 - rng.uniform()) < prop_logp - cur_logp) {
          cur = prop;
          cur_logp = prop_logp;
          cur_L = prop_L;
          ++accepted;
        }
      }
    }
    walk_step *= std::exp((static_cast<double>(accepted) / walk_len - 0.4) / 5.0);
    walk_step = std::clamp(walk_step, 1e-6, 10.0);
    live[worst] = cur;
    liveL[worst] = cur_L;

    stagnant = accepted == 0 ? stagnant + 1 : 0;
    if (stagnant >= 50) {
      aborted = true;
      break;
    }

    const double lmax = *std::max_element(liveL.begin(), liveL.end());
    const double remaining = log_x + lmax;
    if (logaddexp(logz, remaining) - logz < dlogz_stop) break;
    if (it >= max_iters) {
      aborted = true;
      break;
    }
  }

  // final live points share the last prior volume uniformly
  const double log_x_final = -static_cast<double>(it) / nlive;
  for (int i = 0; i < nlive; ++i) {
    const double logw = log_x_final - std::log(static_cast<double>(nlive));
    logz = logaddexp(logz, logw + liveL[i]);
    PosteriorSample s;
    s.theta = live[i];
    s.loglike = liveL[i];
    est.samples.push_back(std::move(s));
    dead_logw_raw.push_back(logw);
  }

  // normalized posterior weights and the information integral H
  double h_info = 0.0;
  for (std::size_t i = 0; i < est.samples.size(); ++i) {
    const double lw = dead_logw_raw[i] + est.samples[i].loglike - logz;
    est.samples[i].logweight = lw;
    const double p = std::exp(lw);
    if (p > 0.0) h_info += p * est.samples[i].loglike;
  }
  h_info -= logz;

  est.logz = logz;
  est.error_bar = std::sqrt(std::max(h_info, 0.0) / nlive);
  est.sample_count = static_cast<long>(est.samples.size());
  est.partial = aborted;
  return est;
}

EvidenceEstimate nested_sampling_evidence(const GPModel& model,
                                          const PriorSpec& prior,
                                          const Dataset& data, int live_points,
                                          double dlogz_stop,
                                          std::uint64_t seed) {
  LogLikeFn ll = [&](const std::vector<double>& th) {
    try {
      return log_mll(model, th, data);
    } catch (const NumericalError&) {
      return kNegInf;
    }
  };
  return nested_sampling_evidence_fn(ll, prior, live_points, dlogz_stop, seed);
}

void write_samples_csv(const EvidenceEstimate& est, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write samples file: " + path);
  const int u = est.samples.empty() ? 0 : static_cast<int>(est.samples[0].theta.size());
  for (int d = 0; d < u; ++d) out << "theta" << d << ",";
  out << "loglike,logweight\n";
  char buf[64];
  for (const PosteriorSample& s : est.samples) {
    for (double v : s.theta) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.loglike, s.logweight);
    out << buf;
  }
}

}  // namespace gpsel
