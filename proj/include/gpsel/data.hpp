#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpsel/kernels.hpp"

namespace gpsel {

struct Dataset {
  std::vector<double> x, y;
  int n() const { return static_cast<int>(x.size()); }
};

// The 10-point linear benchmark: x = 0, 1/9, ..., 1; y = x + noise draw.
Dataset linear_benchmark_dataset();

struct GeneratorSpec {
  ExprPtr expr;
  int n = 10;
  std::uint64_t seed = 0;
  double x_lo = -2.5, x_hi = 2.5;
};

// y ~ N(0, K + noise_variance I) at standard-init hyperparameters (all raw
// values 0, constrained values softplus(0) ~ 0.6931), x evenly spaced.
Dataset sample_from_gp_prior(const GeneratorSpec& spec);

struct NormalizeRecord {
  double mean = 0.0, stdev = 1.0;
  bool applied = false;
};

// y' = (y - mean)/std (population std); x unchanged.
Dataset normalize(const Dataset& d, NormalizeRecord* record = nullptr);

// Two numeric columns (x, y), comma or whitespace separated, optional header;
// rows sorted by x on load. Throws DataError with the offending line number.
Dataset load_csv(const std::string& path);

void write_csv(const Dataset& d, const std::string& path);

}  // namespace gpsel
