#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "recq/scalar_laws.hpp"

namespace recq {

// Strictly increasing quantization grid. Voronoi cells are the half-open
// intervals (x^{j-1/2}, x^{j+1/2}] delimited by the half-points
// (x^j + x^{j+1})/2 with -infinity and +infinity at the two ends.
struct Grid {
  std::vector<double> points;

  std::vector<double> half_points() const;  // length N+1 including the infinities
  bool strictly_increasing() const;
};

struct NewtonReport {
  int iterations = 0;          // Newton iterations taken
  int lloyd_iterations = 0;    // Lloyd steps taken as fallback
  double grad_sup_norm = 0.0;  // gradient sup-norm at the returned grid
  bool used_fallback = false;
  double distortion = 0.0;
};

struct NewtonOptions {
  double tol = 1e-10;  // convergence target on the gradient sup-norm
  int max_newton = 100;
  int max_lloyd = 10000;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, NewtonReport rep, int step = -1)
      : std::runtime_error(what), report(rep), step_index(step) {}
  NewtonReport report;
  int step_index;  // filled by the recursive engine, -1 otherwise
};

// Symmetric tridiagonal matrix: diag has length N, off length N-1.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
};

// D(grid) = sum_j E[(Y - x^j)^2 1{Y in cell j}], assembled per cell as
// M2 - 2 x M1 + x^2 M0 from the cumulative law functions.
double distortion(const Grid& grid, const LawView& law);

// dD/dx^j = 2 [ x^j (F(x^{j+1/2}) - F(x^{j-1/2})) - (M1(x^{j+1/2}) - M1(x^{j-1/2})) ].
std::vector<double> distortion_gradient(const Grid& grid, const LawView& law);

// Tridiagonal Hessian of the distortion; needs the density at interior
// half-points.
Tridiagonal distortion_hessian(const Grid& grid, const LawView& law);

// One fixed-point step x^j <- cell mean. Cells with mass below 1e-15 are
// relocated to the midpoint of the largest-mass cell.
Grid lloyd_step(const Grid& grid, const LawView& law);

// Cell probabilities; sums to 1 within 1e-12.
std::vector<double> companion_weights(const Grid& grid, const LawView& law);

// Quantile grid at levels (2j-1)/(2N) by bisection on the cdf, with collision
// perturbation so the result is strictly increasing.
Grid init_grid(const LawView& law, int N);

struct OptimizeResult {
  Grid grid;
  NewtonReport report;
};

// Newton's method on the distortion gradient with the tridiagonal Hessian;
// any rejected step (non-positive-definite Hessian, monotonicity violation,
// or distortion increase) is replaced by one Lloyd step. Laws with atoms are
// optimized by Lloyd only. Output distortion never exceeds the initial one.
// Throws ConvergenceError when neither loop reaches tol within its budget.
OptimizeResult newton_optimize(const LawView& law, int N, const Grid* init = nullptr,
                               const NewtonOptions& options = {});

// Gaussian-mixture gradient/Hessian assembled from per-component normalized
// cell edges; agrees with the generic assembly to 1e-12.
std::vector<double> distortion_gradient_gaussian(const Grid& grid,
                                                 const std::vector<GaussianComponent>& comps);
Tridiagonal distortion_hessian_gaussian(const Grid& grid,
                                        const std::vector<GaussianComponent>& comps);

}  // namespace recq
