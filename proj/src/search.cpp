#include "gpsel/search.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "gpsel/errors.hpp"
#include "gpsel/rng.hpp"

namespace gpsel {

const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::MLL: return "MLL";
    case Criterion::MAP: return "MAP";
    case Criterion::AIC: return "AIC";
    case Criterion::BIC: return "BIC";
    case Criterion::LapS: return "LapS";
    case Criterion::LapAIC: return "LapAIC";
    case Criterion::LapBIC: return "LapBIC";
  }
  return "?";
}

Criterion parse_criterion(const std::string& name) {
  if (name == "MLL") return Criterion::MLL;
  if (name == "MAP") return Criterion::MAP;
  if (name == "AIC") return Criterion::AIC;
  if (name == "BIC") return Criterion::BIC;
  if (name == "LapS") return Criterion::LapS;
  if (name == "LapAIC") return Criterion::LapAIC;
  if (name == "LapBIC") return Criterion::LapBIC;
  throw ConfigError("unknown criterion '" + name + "'");
}

namespace {

double criterion_value(const EvaluationResult& ev, Criterion c) {
  switch (c) {
    case Criterion::MLL: return ev.mll;
    case Criterion::MAP: return ev.map_value;
    case Criterion::AIC: return ev.aic;
    case Criterion::BIC: return ev.bic;
    case Criterion::LapS: return ev.logz_laps;
    case Criterion::LapAIC: return ev.logz_lapaic;
    case Criterion::LapBIC: return ev.logz_lapbic;
  }
  return 0.0;
}

// internal "higher is better" transform: negate the information criteria
double score_of(const EvaluationResult& ev, Criterion c) {
  const double v = criterion_value(ev, c);
  return (c == Criterion::AIC || c == Criterion::BIC) ? -v : v;
}

// deterministic (score desc, size asc, render asc) candidate ordering
bool better(const CandidateRecord& a, const CandidateRecord& b) {
  if (a.score != b.score) return a.score > b.score;
  const int sa = expr_size(a.expr), sb = expr_size(b.expr);
  if (sa != sb) return sa < sb;
  return render(a.expr) < render(b.expr);
}

}  // namespace

SearchTrace cks_search(const Dataset& data, Criterion criterion, int depth,
                       const std::vector<ExprPtr>& bases, std::uint64_t seed,
                       int restarts, int max_iters) {
  if (depth < 1) throw ConfigError("search depth must be >= 1");
  if (bases.empty()) throw ConfigError("search needs a non-empty base-kernel set");

  SearchTrace trace;
  trace.criterion = criterion;
  double incumbent_score = -std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= depth; ++iter) {
    std::vector<ExprPtr> candidates;
    if (iter == 1) {
      candidates = bases;
    } else {
      for (const ExprPtr& b : bases) candidates.push_back(sum(trace.best, b));
      for (const ExprPtr& b : bases) candidates.push_back(product(trace.best, b));
    }

    SearchIteration rec;
    rec.candidates.resize(candidates.size());
    const int nc = static_cast<int>(candidates.size());
#pragma omp parallel for schedule(dynamic)
    for (int ci = 0; ci < nc; ++ci) {
      CandidateRecord& cr = rec.candidates[ci];
      cr.expr = candidates[ci];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        GPModel model{candidates[ci]};
        const PriorSpec prior = build_prior(candidates[ci]);
        const std::uint64_t cseed =
            Rng::derive(seed, 1000ULL * iter + static_cast<std::uint64_t>(ci));
        cr.eval = criteria_suite(model, prior, data, cseed, restarts, max_iters);
        cr.criterion_value = criterion_value(cr.eval, criterion);
        cr.score = score_of(cr.eval, criterion);
      } catch (const std::exception& e) {
        cr.failed = true;
        cr.error = e.what();
      }
      cr.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0).count();
    }

    int best_ci = -1;
    for (int ci = 0; ci < nc; ++ci) {
      if (rec.candidates[ci].failed) {
        trace.partial = true;
        continue;
      }
      if (best_ci < 0 || better(rec.candidates[ci], rec.candidates[best_ci])) {
        best_ci = ci;
      }
    }
    rec.chosen_index = best_ci;
    if (best_ci < 0) {  // every candidate failed: abort with partial trace
      trace.iterations.push_back(std::move(rec));
      trace.partial = true;
      break;
    }

    const double best_score = rec.candidates[best_ci].score;
    if (iter == 1 || best_score > incumbent_score) {
      rec.accepted = true;
      trace.best = rec.candidates[best_ci].expr;
      incumbent_score = best_score;
      trace.iterations.push_back(std::move(rec));
    } else {
      trace.iterations.push_back(std::move(rec));  // logged, not accepted
      break;
    }
  }

  trace.best_score = incumbent_score;
  return trace;
}

bool recognition_check(const ExprPtr& found, const ExprPtr& generating) {
  return canonical_render(found) == canonical_render(generating);
}

}  // namespace gpsel
