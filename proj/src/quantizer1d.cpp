#include "recq/quantizer1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recq/special_functions.hpp"

namespace recq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassFloor = 1e-15;

// Per-cell quantities derived from one batch evaluation at the half-points.
struct CellEval {
  std::vector<double> dF, dM1, dM2;  // per-cell mass and partial moments
  std::vector<double> fh;            // density at the N+1 half-points
  double distortion = 0.0;
  double grad_sup = 0.0;
  std::vector<double> grad;
};

CellEval evaluate_cells(const Grid& grid, const LawView& law) {
  const size_t n = grid.points.size();
  const std::vector<double> hp = grid.half_points();
  std::vector<double> F(n + 1), M1(n + 1), M2(n + 1), f(n + 1);
  law.batch(hp, F.data(), M1.data(), M2.data(), f.data());
  CellEval e;
  e.dF.resize(n);
  e.dM1.resize(n);
  e.dM2.resize(n);
  e.grad.resize(n);
  e.fh = std::move(f);
  for (size_t j = 0; j < n; ++j) {
    e.dF[j] = F[j + 1] - F[j];
    e.dM1[j] = M1[j + 1] - M1[j];
    e.dM2[j] = M2[j + 1] - M2[j];
    const double x = grid.points[j];
    e.distortion += e.dM2[j] - 2.0 * x * e.dM1[j] + x * x * e.dF[j];
    e.grad[j] = 2.0 * (x * e.dF[j] - e.dM1[j]);
    e.grad_sup = std::max(e.grad_sup, std::abs(e.grad[j]));
  }
  e.distortion = std::max(0.0, e.distortion);
  return e;
}

Tridiagonal hessian_from_cells(const Grid& grid, const CellEval& e) {
  const size_t n = grid.points.size();
  Tridiagonal h;
  h.diag.resize(n);
  h.off.resize(n > 0 ? n - 1 : 0);
  for (size_t j = 0; j < n; ++j) {
    double d = 2.0 * e.dF[j];
    if (j + 1 < n) d -= 0.5 * e.fh[j + 1] * (grid.points[j + 1] - grid.points[j]);
    if (j > 0) d -= 0.5 * e.fh[j] * (grid.points[j] - grid.points[j - 1]);
    h.diag[j] = d;
  }
  for (size_t j = 0; j + 1 < n; ++j)
    h.off[j] = -0.5 * e.fh[j + 1] * (grid.points[j + 1] - grid.points[j]);
  return h;
}

// LDL^T solve of (tridiagonal) H x = b; returns false when a pivot is not
// strictly positive (H not positive definite).
bool solve_tridiag_spd(const Tridiagonal& h, const std::vector<double>& b,
                       std::vector<double>& x) {
  const size_t n = h.diag.size();
  std::vector<double> piv(n), l(n > 0 ? n - 1 : 0);
  x = b;
  for (size_t j = 0; j < n; ++j) {
    double d = h.diag[j];
    if (j > 0) d -= l[j - 1] * l[j - 1] * piv[j - 1];
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    piv[j] = d;
    if (j + 1 < n) l[j] = h.off[j] / d;
  }
  for (size_t j = 1; j < n; ++j) x[j] -= l[j - 1] * x[j - 1];
  for (size_t j = 0; j < n; ++j) x[j] /= piv[j];
  for (size_t j = n - 1; j-- > 0;) x[j] -= l[j] * x[j + 1];
  return true;
}

void enforce_strictly_increasing(std::vector<double>& pts) {
  std::sort(pts.begin(), pts.end());
  for (size_t j = 1; j < pts.size(); ++j)
    if (!(pts[j] > pts[j - 1]))
      pts[j] = std::nextafter(pts[j - 1], kInf);
}

// Lloyd update reusing an existing cell evaluation.
std::vector<double> lloyd_points(const Grid& grid, const LawView& law, const CellEval& e) {
  const size_t n = grid.points.size();
  const std::vector<double> hp = grid.half_points();
  size_t jmax = 0;
  for (size_t j = 1; j < n; ++j)
    if (e.dF[j] > e.dF[jmax]) jmax = j;
  const double lo_b = std::isfinite(hp[jmax]) ? hp[jmax] : law.lo;
  const double hi_b = std::isfinite(hp[jmax + 1]) ? hp[jmax + 1] : law.hi;
  const double relocate = 0.5 * (lo_b + hi_b);
  std::vector<double> next(n);
  for (size_t j = 0; j < n; ++j)
    next[j] = e.dF[j] >= kMassFloor ? e.dM1[j] / e.dF[j] : relocate;
  enforce_strictly_increasing(next);
  return next;
}

}  // namespace

std::vector<double> Grid::half_points() const {
  const size_t n = points.size();
  std::vector<double> hp(n + 1);
  hp[0] = -kInf;
  for (size_t j = 1; j < n; ++j) hp[j] = 0.5 * (points[j - 1] + points[j]);
  hp[n] = kInf;
  return hp;
}

bool Grid::strictly_increasing() const {
  for (size_t j = 1; j < points.size(); ++j)
    if (!(points[j] > points[j - 1])) return false;
  return !points.empty() && std::isfinite(points.front()) && std::isfinite(points.back());
}

double distortion(const Grid& grid, const LawView& law) {
  if (!grid.strictly_increasing()) throw std::invalid_argument("distortion: invalid grid");
  return evaluate_cells(grid, law).distortion;
}

std::vector<double> distortion_gradient(const Grid& grid, const LawView& law) {
  if (!grid.strictly_increasing())
    throw std::invalid_argument("distortion_gradient: invalid grid");
  return evaluate_cells(grid, law).grad;
}

Tridiagonal distortion_hessian(const Grid& grid, const LawView& law) {
  if (!grid.strictly_increasing())
    throw std::invalid_argument("distortion_hessian: invalid grid");
  const CellEval e = evaluate_cells(grid, law);
  return hessian_from_cells(grid, e);
}

Grid lloyd_step(const Grid& grid, const LawView& law) {
  if (!grid.strictly_increasing()) throw std::invalid_argument("lloyd_step: invalid grid");
  const CellEval e = evaluate_cells(grid, law);
  return Grid{lloyd_points(grid, law, e)};
}

std::vector<double> companion_weights(const Grid& grid, const LawView& law) {
  if (!grid.strictly_increasing())
    throw std::invalid_argument("companion_weights: invalid grid");
  CellEval e = evaluate_cells(grid, law);
  for (double& w : e.dF) w = std::max(0.0, w);
  return e.dF;
}

Grid init_grid(const LawView& law, int N) {
  if (N < 1) throw std::invalid_argument("init_grid: N must be >= 1");
  const size_t n = static_cast<size_t>(N);
  std::vector<double> lo(n, law.lo), hi(n, law.hi), mid(n), F(n), M1(n), M2(n), f(n);
  // vectorized bisection: one batch evaluation per iteration
  for (int it = 0; it < 100; ++it) {
    for (size_t j = 0; j < n; ++j) mid[j] = 0.5 * (lo[j] + hi[j]);
    law.batch(mid, F.data(), M1.data(), M2.data(), f.data());
    for (size_t j = 0; j < n; ++j) {
      const double target = (2.0 * (j + 1) - 1.0) / (2.0 * n);
      (F[j] < target ? lo[j] : hi[j]) = mid[j];
    }
  }
  for (size_t j = 0; j < n; ++j) mid[j] = 0.5 * (lo[j] + hi[j]);
  enforce_strictly_increasing(mid);
  return Grid{std::move(mid)};
}

OptimizeResult newton_optimize(const LawView& law, int N, const Grid* init,
                               const NewtonOptions& options) {
  if (N < 1) throw std::invalid_argument("newton_optimize: N must be >= 1");
  Grid grid = init != nullptr ? *init : init_grid(law, N);
  if (static_cast<int>(grid.points.size()) != N)
    throw std::invalid_argument("newton_optimize: init size differs from N");
  if (!grid.strictly_increasing())
    throw std::invalid_argument("newton_optimize: init grid not strictly increasing");

  NewtonReport report;
  CellEval e = evaluate_cells(grid, law);
  while (true) {
    report.grad_sup_norm = e.grad_sup;
    report.distortion = e.distortion;
    if (e.grad_sup <= options.tol) return {std::move(grid), report};

    bool stepped = false;
    if (!law.has_atoms && report.iterations < options.max_newton) {
      const Tridiagonal h = hessian_from_cells(grid, e);
      std::vector<double> delta;
      if (solve_tridiag_spd(h, e.grad, delta)) {
        Grid cand;
        cand.points.resize(grid.points.size());
        bool monotone = true;
        for (size_t j = 0; j < grid.points.size(); ++j) {
          cand.points[j] = grid.points[j] - delta[j];
          if (!std::isfinite(cand.points[j]) || (j > 0 && cand.points[j] <= cand.points[j - 1]))
            monotone = false;
        }
        if (monotone) {
          CellEval ce = evaluate_cells(cand, law);
          if (ce.distortion <= e.distortion * (1.0 + 1e-14) + 1e-300) {
            grid = std::move(cand);
            e = std::move(ce);
            ++report.iterations;
            stepped = true;
          }
        }
      }
    }
    if (!stepped) {
      if (report.lloyd_iterations >= options.max_lloyd) {
        report.used_fallback = true;
        throw ConvergenceError("newton_optimize: iteration budget exhausted", report);
      }
      Grid next{lloyd_points(grid, law, e)};
      CellEval ne = evaluate_cells(next, law);
      grid = std::move(next);
      e = std::move(ne);
      ++report.lloyd_iterations;
      report.used_fallback = true;
    }
  }
}

std::vector<double> distortion_gradient_gaussian(const Grid& grid,
                                                 const std::vector<GaussianComponent>& comps) {
  if (!grid.strictly_increasing())
    throw std::invalid_argument("distortion_gradient_gaussian: invalid grid");
  const size_t n = grid.points.size();
  const std::vector<double> hp = grid.half_points();
  std::vector<double> grad(n, 0.0);
  for (const auto& comp : comps) {
    if (comp.sd > 0.0) {
      const double inv = 1.0 / comp.sd;
      double Plo = 0.0, dlo = 0.0;  // edge values at x^{j-1/2}
      for (size_t j = 0; j < n; ++j) {
        double Pj, dj;
        if (j + 1 == n) {
          Pj = 1.0;
          dj = 0.0;
        } else {
          const double t = (hp[j + 1] - comp.mean) * inv;
          Pj = std_normal_cdf(t);
          dj = std_normal_pdf(t);
        }
        grad[j] += 2.0 * comp.weight *
                   ((grid.points[j] - comp.mean) * (Pj - Plo) + comp.sd * (dj - dlo));
        Plo = Pj;
        dlo = dj;
      }
    } else {
      // point mass: contributes (x^j - atom) on its cell
      for (size_t j = 0; j < n; ++j) {
        if (hp[j] < comp.mean && comp.mean <= hp[j + 1]) {
          grad[j] += 2.0 * comp.weight * (grid.points[j] - comp.mean);
          break;
        }
      }
    }
  }
  return grad;
}

Tridiagonal distortion_hessian_gaussian(const Grid& grid,
                                        const std::vector<GaussianComponent>& comps) {
  if (!grid.strictly_increasing())
    throw std::invalid_argument("distortion_hessian_gaussian: invalid grid");
  const size_t n = grid.points.size();
  const std::vector<double> hp = grid.half_points();
  Tridiagonal h;
  h.diag.assign(n, 0.0);
  h.off.assign(n > 0 ? n - 1 : 0, 0.0);
  for (const auto& comp : comps) {
    if (comp.sd > 0.0) {
      const double inv = 1.0 / comp.sd;
      double Plo = 0.0, dlo = 0.0;
      for (size_t j = 0; j < n; ++j) {
        double Pj, dj;
        if (j + 1 == n) {
          Pj = 1.0;
          dj = 0.0;
        } else {
          const double t = (hp[j + 1] - comp.mean) * inv;
          Pj = std_normal_cdf(t);
          dj = std_normal_pdf(t);
        }
        double d = 2.0 * comp.weight * (Pj - Plo);
        if (j + 1 < n)
          d -= 0.5 * comp.weight * inv * dj * (grid.points[j + 1] - grid.points[j]);
        if (j > 0) d -= 0.5 * comp.weight * inv * dlo * (grid.points[j] - grid.points[j - 1]);
        h.diag[j] += d;
        if (j + 1 < n)
          h.off[j] -= 0.5 * comp.weight * inv * dj * (grid.points[j + 1] - grid.points[j]);
        Plo = Pj;
        dlo = dj;
      }
    } else {
      for (size_t j = 0; j < n; ++j) {
        if (hp[j] < comp.mean && comp.mean <= hp[j + 1]) {
          h.diag[j] += 2.0 * comp.weight;
          break;
        }
      }
    }
  }
  return h;
}

}  // namespace recq
