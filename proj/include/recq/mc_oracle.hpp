#pragma once

#include <cstdint>
#include <vector>

#include "recq/pricing.hpp"
#include "recq/schemes.hpp"

namespace recq {

struct PathBatch {
  std::vector<double> terminal;  // X_T per path
  std::uint64_t seed = 0;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// M independent terminal draws of the scheme; path j's randomness is a pure
// function of (seed, j), so batches are reproducible and order-independent.
PathBatch simulate_terminal(const PreparedScheme& scheme, std::int64_t paths,
                            std::uint64_t seed);

// Sample mean and standard error of the batch.
McEstimate mc_mean(const PathBatch& batch);

// Unbiased sample variance and its (Gaussian-approximation) standard error.
McEstimate mc_variance(const PathBatch& batch);

// Discounted put price estimate with standard error.
McEstimate mc_put(const PathBatch& batch, const PutSpec& put);

}  // namespace recq
