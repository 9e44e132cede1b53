#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpsel/laplace.hpp"

namespace gpsel {

enum class Criterion { MLL, MAP, AIC, BIC, LapS, LapAIC, LapBIC };

const char* criterion_name(Criterion c);
Criterion parse_criterion(const std::string& name);  // throws ConfigError

struct CandidateRecord {
  ExprPtr expr;
  double criterion_value = 0.0;  // raw criterion value (AIC/BIC: lower better)
  double score = 0.0;            // internal higher-is-better transform
  EvaluationResult eval;
  double seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct SearchIteration {
  std::vector<CandidateRecord> candidates;
  int chosen_index = -1;  // best candidate of this iteration
  bool accepted = false;  // improved on the incumbent and became it
};

struct SearchTrace {
  std::vector<SearchIteration> iterations;
  ExprPtr best;
  double best_score = 0.0;
  Criterion criterion = Criterion::LapS;
  bool partial = false;  // some candidates failed along the way
};

// Greedy CKS: iteration 1 candidates are the bases; iteration i>1 candidates
// are {best + B, best * B}. Candidates are scored by criteria_suite (AIC/BIC
// negated so every criterion maximizes); ties break by smaller expression
// size, then lexicographic rendering. Stops early when no candidate improves
// the incumbent. Candidate evaluations may run concurrently; each candidate's
// seed is derived from (seed, iteration, index), so results are schedule-
// independent. An iteration whose candidates all fail aborts the search with
// a partial trace.
SearchTrace cks_search(const Dataset& data, Criterion criterion, int depth,
                       const std::vector<ExprPtr>& bases, std::uint64_t seed,
                       int restarts = 5, int max_iters = 1000);

// Structural equality modulo commutativity (canonical forms compare equal).
bool recognition_check(const ExprPtr& found, const ExprPtr& generating);

}  // namespace gpsel
