#include "recq/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "recq/rng.hpp"

namespace recq {

namespace {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 128) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

}  // namespace

PathBatch simulate_terminal(const PreparedScheme& scheme, std::int64_t paths,
                            std::uint64_t seed) {
  if (paths < 1) throw std::invalid_argument("simulate_terminal: paths must be >= 1");
  PathBatch batch;
  batch.seed = seed;
  batch.terminal.resize(static_cast<std::size_t>(paths));
  const int n = scheme.spec.n;
  for (std::int64_t j = 0; j < paths; ++j) {
    RngStream rng(substream_seed(seed, static_cast<std::uint64_t>(j)));
    double x = scheme.spec.x0;
    for (int k = 0; k < n; ++k) x = simulate_step(scheme, k, x, rng);
    batch.terminal[static_cast<std::size_t>(j)] = x;
  }
  return batch;
}

McEstimate mc_mean(const PathBatch& batch) {
  const std::size_t M = batch.terminal.size();
  if (M == 0) throw std::invalid_argument("mc_mean: empty batch");
  const double mean = pairwise_sum(batch.terminal) / static_cast<double>(M);
  if (M == 1) return {mean, 0.0};
  std::vector<double> sq(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double d = batch.terminal[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(M - 1);
  return {mean, std::sqrt(var / static_cast<double>(M))};
}

McEstimate mc_variance(const PathBatch& batch) {
  const std::size_t M = batch.terminal.size();
  if (M < 2) throw std::invalid_argument("mc_variance: need at least 2 paths");
  const double mean = pairwise_sum(batch.terminal) / static_cast<double>(M);
  std::vector<double> sq(M), quart(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double d = batch.terminal[i] - mean;
    sq[i] = d * d;
    quart[i] = d * d * d * d;
  }
  const double Md = static_cast<double>(M);
  const double var = pairwise_sum(sq) / (Md - 1.0);
  const double m4 = pairwise_sum(quart) / Md;
  // Var(s^2) ~ (m4 - (M-3)/(M-1) s^4)/M, valid beyond Gaussian tails.
  const double vv = std::max(0.0, (m4 - (Md - 3.0) / (Md - 1.0) * var * var) / Md);
  return {var, std::sqrt(vv)};
}

McEstimate mc_put(const PathBatch& batch, const PutSpec& put) {
  const std::size_t M = batch.terminal.size();
  if (M == 0) throw std::invalid_argument("mc_put: empty batch");
  const double disc = std::exp(-put.rate * put.maturity);
  std::vector<double> pay(M);
  for (std::size_t i = 0; i < M; ++i) {
    pay[i] = std::max(put.strike - batch.terminal[i], 0.0);
  }
  const double mean = pairwise_sum(pay) / static_cast<double>(M);
  if (M == 1) return {disc * mean, 0.0};
  std::vector<double> sq(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double d = pay[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(M - 1);
  return {disc * mean, disc * std::sqrt(var / static_cast<double>(M))};
}

}  // namespace recq
