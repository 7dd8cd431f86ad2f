#pragma once

#include <functional>
#include <vector>

#include "recq/quantizer1d.hpp"
#include "recq/scalar_laws.hpp"
#include "recq/schemes.hpp"

namespace recq {

// Output of the step-by-step quantization of a scheme: one grid per time step
// with its marginal weights, plus the one-step transition matrices.
struct QuantizedChain {
  std::vector<Grid> grids;                           // k = 0..n
  std::vector<std::vector<double>> marginal_weights; // k = 0..n
  // transitions[k] is row-major levels[k] x levels[k+1], k = 0..n-1.
  std::vector<std::vector<double>> transitions;
  std::vector<int> levels;          // k = 0..n
  std::vector<NewtonReport> reports; // reports[k] produced grid k; [0] empty
};

// Quantizes the chain X_{k+1} = F_k(X_k, Z) step by step: at each step the
// marginal law is the weight-mixture of one-step laws from the previous grid,
// the next grid is optimized on it, and weights/transitions are read off the
// cell boundaries. levels[0] must be 1 (deterministic start).
QuantizedChain recursive_quantize(const PreparedScheme& scheme,
                                  const std::vector<int>& levels,
                                  const NewtonOptions& options = {});

// P(X_{k+1} in cell j of grid_next | X_k = x_i): the one-step law's cdf
// differenced at the half-points of grid_next.
std::vector<double> transition_row(const PreparedScheme& scheme, int k, double x_i,
                                   const Grid& grid_next);

struct DensityRow {
  double left;
  double right;
  double value;
};

// Piecewise-constant density table: on [x^{i-1}, x^i] the value
// 2 w_i / (x^{i+1} - x^{i-1}), for interior i; requires at least 3 points.
std::vector<DensityRow> density_estimate(const Grid& grid,
                                         const std::vector<double>& weights);

double chain_mean(const QuantizedChain& chain, int k);
double chain_variance(const QuantizedChain& chain, int k);

// ---- Componentwise product quantization (d >= 2, Euler dynamics) ----

struct EulerSpecND {
  int d = 0;  // state dimension
  int q = 0;  // driving Brownian dimension
  std::vector<double> x0;
  double T = 1.0;
  int n = 1;
  // drift(t, x, out): fills out[0..d); rows(t, x, out): fills the d x q
  // diffusion matrix row-major.
  std::function<void(double, const std::vector<double>&, std::vector<double>&)> drift;
  std::function<void(double, const std::vector<double>&, std::vector<double>&)> diffusion;

  double h() const { return T / static_cast<double>(n); }
};

struct ProductChain {
  std::vector<std::vector<Grid>> grids;           // [k][dim]
  std::vector<std::vector<double>> node_weights;  // [k], row-major over dims
  std::vector<std::vector<int>> levels;           // [k][dim]
};

// Marginal grids optimized per dimension; node weights propagated through the
// exact multivariate Gaussian rectangle probabilities (factorized when the
// diffusion rows are orthogonal, bivariate quadrature when d = 2).
ProductChain product_quantize(const EulerSpecND& spec,
                              const std::vector<std::vector<int>>& levels,
                              const NewtonOptions& options = {});

}  // namespace recq
