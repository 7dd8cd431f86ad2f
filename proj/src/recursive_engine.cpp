#include "recq/recursive_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "recq/special_functions.hpp"

namespace recq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_levels(const std::vector<int>& levels, int n) {
  if (static_cast<int>(levels.size()) != n + 1) {
    throw std::invalid_argument("recursive_quantize: levels must list N_0..N_n");
  }
  if (levels[0] != 1) {
    throw std::invalid_argument(
        "recursive_quantize: N_0 must be 1 (deterministic initial value)");
  }
  for (int N : levels) {
    if (N < 1) throw std::invalid_argument("recursive_quantize: levels must be >= 1");
  }
}

}  // namespace

QuantizedChain recursive_quantize(const PreparedScheme& scheme,
                                  const std::vector<int>& levels,
                                  const NewtonOptions& options) {
  const int n = scheme.spec.n;
  validate_levels(levels, n);

  QuantizedChain chain;
  chain.levels = levels;
  chain.grids.resize(static_cast<std::size_t>(n) + 1);
  chain.marginal_weights.resize(static_cast<std::size_t>(n) + 1);
  chain.transitions.resize(static_cast<std::size_t>(n));
  chain.reports.resize(static_cast<std::size_t>(n) + 1);

  chain.grids[0].points = {scheme.spec.x0};
  chain.marginal_weights[0] = {1.0};

  std::vector<ScalarLaw> laws;
  for (int k = 0; k < n; ++k) {
    const std::vector<double>& xs = chain.grids[static_cast<std::size_t>(k)].points;
    const std::vector<double>& ws = chain.marginal_weights[static_cast<std::size_t>(k)];
    laws.clear();
    laws.reserve(xs.size());
    for (double x : xs) laws.push_back(step_law(scheme, k, x));

    const LawView view = mixture_law_view(ws, laws);
    const int N = levels[static_cast<std::size_t>(k) + 1];

    // Warm start: previous grid recentred on the new mixture mean and scaled
    // by the std ratio. Only possible when the level count is unchanged.
    Grid init;
    const Grid* initp = nullptr;
    if (k >= 1 && levels[static_cast<std::size_t>(k)] == N) {
      double m_old = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) m_old += ws[i] * xs[i];
      double v_old = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        v_old += ws[i] * (xs[i] - m_old) * (xs[i] - m_old);
      }
      const double v_new = view.second_moment - view.mean * view.mean;
      if (v_old > 0.0 && v_new > 0.0) {
        const double ratio = std::sqrt(v_new / v_old);
        init.points.resize(static_cast<std::size_t>(N));
        for (int j = 0; j < N; ++j) {
          init.points[static_cast<std::size_t>(j)] =
              view.mean + (xs[static_cast<std::size_t>(j)] - m_old) * ratio;
        }
        if (init.strictly_increasing()) initp = &init;
      }
    }

    OptimizeResult res;
    try {
      res = newton_optimize(view, N, initp, options);
    } catch (const ConvergenceError& err) {
      throw ConvergenceError(
          std::string(err.what()) + " (at chain step " + std::to_string(k + 1) + ")",
          err.report, k + 1);
    }
    chain.grids[static_cast<std::size_t>(k) + 1] = std::move(res.grid);
    chain.reports[static_cast<std::size_t>(k) + 1] = res.report;

    const std::vector<double> hp =
        chain.grids[static_cast<std::size_t>(k) + 1].half_points();
    std::vector<double>& trans = chain.transitions[static_cast<std::size_t>(k)];
    trans.assign(xs.size() * static_cast<std::size_t>(N), 0.0);
    std::vector<double>& wnext = chain.marginal_weights[static_cast<std::size_t>(k) + 1];
    wnext.assign(static_cast<std::size_t>(N), 0.0);

    std::vector<double> F(hp.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      law_cdf_batch(laws[i], hp, F.data());
      for (int j = 0; j < N; ++j) {
        const double pij =
            std::max(0.0, F[static_cast<std::size_t>(j) + 1] - F[static_cast<std::size_t>(j)]);
        trans[i * static_cast<std::size_t>(N) + static_cast<std::size_t>(j)] = pij;
        wnext[static_cast<std::size_t>(j)] += ws[i] * pij;
      }
    }
  }
  return chain;
}

std::vector<double> transition_row(const PreparedScheme& scheme, int k, double x_i,
                                   const Grid& grid_next) {
  const ScalarLaw law = step_law(scheme, k, x_i);
  const std::vector<double> hp = grid_next.half_points();
  std::vector<double> F(hp.size());
  law_cdf_batch(law, hp, F.data());
  std::vector<double> row(grid_next.points.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    row[j] = std::max(0.0, F[j + 1] - F[j]);
  }
  return row;
}

std::vector<DensityRow> density_estimate(const Grid& grid,
                                         const std::vector<double>& weights) {
  const std::size_t N = grid.points.size();
  if (N < 3) throw std::invalid_argument("density_estimate: need at least 3 points");
  if (weights.size() != N) {
    throw std::invalid_argument("density_estimate: weights/grid size mismatch");
  }
  std::vector<DensityRow> rows;
  rows.reserve(N - 2);
  const std::vector<double>& x = grid.points;
  for (std::size_t i = 1; i + 1 < N; ++i) {
    rows.push_back({x[i - 1], x[i], 2.0 * weights[i] / (x[i + 1] - x[i - 1])});
  }
  return rows;
}

double chain_mean(const QuantizedChain& chain, int k) {
  const auto& x = chain.grids.at(static_cast<std::size_t>(k)).points;
  const auto& w = chain.marginal_weights.at(static_cast<std::size_t>(k));
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m += w[i] * x[i];
  return m;
}

double chain_variance(const QuantizedChain& chain, int k) {
  const auto& x = chain.grids.at(static_cast<std::size_t>(k)).points;
  const auto& w = chain.marginal_weights.at(static_cast<std::size_t>(k));
  const double m = chain_mean(chain, k);
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += w[i] * (x[i] - m) * (x[i] - m);
  return v;
}

// ---------------------------------------------------------------------------
// Product quantization
// ---------------------------------------------------------------------------

namespace {

// P(Z1 <= b1, Z2 <= b2) for standard bivariate normal with correlation rho,
// by adaptive Simpson integration of phi(z) * Phi0((b2 - rho z)/sqrt(1-rho^2)).
class BivariateCdf {
 public:
  explicit BivariateCdf(double rho) : rho_(rho) {
    const double s2 = 1.0 - rho * rho;
    degenerate_ = s2 < 1e-12;
    inv_s_ = degenerate_ ? 0.0 : 1.0 / std::sqrt(s2);
  }

  double operator()(double b1, double b2) const {
    if (b1 == -kInf || b2 == -kInf) return 0.0;
    if (b1 == kInf && b2 == kInf) return 1.0;
    if (b1 == kInf) return std_normal_cdf(b2);
    if (b2 == kInf) return std_normal_cdf(b1);
    if (degenerate_) {
      // Z2 = sign(rho) * Z1 almost surely.
      if (rho_ >= 0.0) return std_normal_cdf(std::min(b1, b2));
      return std::max(0.0, std_normal_cdf(b1) - std_normal_cdf(-b2));
    }
    auto g = [this, b2](double z) {
      return std_normal_pdf(z) * std_normal_cdf((b2 - rho_ * z) * inv_s_);
    };
    const double lo = -12.0;
    const double hi = std::min(b1, 12.0);
    if (hi <= lo) return 0.0;
    return simpson(g, lo, hi, g(lo), g(0.5 * (lo + hi)), g(hi), 1e-10, 40);
  }

 private:
  template <class F>
  static double simpson(const F& g, double a, double b, double fa, double fm, double fb,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g(lm), frm = g(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
      return left + right + delta / 15.0;
    }
    return simpson(g, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           simpson(g, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
  }

  double rho_;
  double inv_s_;
  bool degenerate_;
};

struct NodeIterator {
  std::vector<int> sizes;
  std::vector<int> idx;
  bool done = false;

  explicit NodeIterator(std::vector<int> s) : sizes(std::move(s)), idx(sizes.size(), 0) {
    for (int v : sizes) {
      if (v <= 0) done = true;
    }
  }
  void next() {
    for (std::size_t d = idx.size(); d-- > 0;) {
      if (++idx[d] < sizes[d]) return;
      idx[d] = 0;
    }
    done = true;
  }
};

std::size_t flat_index(const std::vector<int>& idx, const std::vector<int>& sizes) {
  std::size_t f = 0;
  for (std::size_t d = 0; d < idx.size(); ++d) {
    f = f * static_cast<std::size_t>(sizes[d]) + static_cast<std::size_t>(idx[d]);
  }
  return f;
}

}  // namespace

ProductChain product_quantize(const EulerSpecND& spec,
                              const std::vector<std::vector<int>>& levels,
                              const NewtonOptions& options) {
  const int d = spec.d;
  if (d < 2) throw std::invalid_argument("product_quantize: d must be >= 2");
  if (spec.q < 1) throw std::invalid_argument("product_quantize: q must be >= 1");
  if (static_cast<int>(spec.x0.size()) != d) {
    throw std::invalid_argument("product_quantize: x0 size mismatch");
  }
  if (spec.n < 1 || !(spec.T > 0.0)) {
    throw std::invalid_argument("product_quantize: need n >= 1 and T > 0");
  }
  if (!spec.drift || !spec.diffusion) {
    throw std::invalid_argument("product_quantize: drift/diffusion missing");
  }
  const int n = spec.n;
  if (static_cast<int>(levels.size()) != n + 1) {
    throw std::invalid_argument("product_quantize: levels must list steps 0..n");
  }
  for (int k = 0; k <= n; ++k) {
    if (static_cast<int>(levels[static_cast<std::size_t>(k)].size()) != d) {
      throw std::invalid_argument("product_quantize: per-step levels must have d entries");
    }
    for (int N : levels[static_cast<std::size_t>(k)]) {
      if (N < 1) throw std::invalid_argument("product_quantize: levels must be >= 1");
      if (k == 0 && N != 1) {
        throw std::invalid_argument("product_quantize: step-0 levels must be 1");
      }
    }
  }

  const double h = spec.h();
  const double sqh = std::sqrt(h);

  ProductChain chain;
  chain.levels = levels;
  chain.grids.resize(static_cast<std::size_t>(n) + 1);
  chain.node_weights.resize(static_cast<std::size_t>(n) + 1);

  chain.grids[0].resize(static_cast<std::size_t>(d));
  for (int l = 0; l < d; ++l) {
    chain.grids[0][static_cast<std::size_t>(l)].points = {spec.x0[static_cast<std::size_t>(l)]};
  }
  chain.node_weights[0] = {1.0};

  std::vector<double> x(static_cast<std::size_t>(d));
  std::vector<double> bvec(static_cast<std::size_t>(d));
  std::vector<double> sig(static_cast<std::size_t>(d) * static_cast<std::size_t>(spec.q));

  for (int k = 0; k < n; ++k) {
    const auto& gcur = chain.grids[static_cast<std::size_t>(k)];
    const auto& wcur = chain.node_weights[static_cast<std::size_t>(k)];
    const std::vector<int>& szs = levels[static_cast<std::size_t>(k)];
    const std::vector<int>& nxt = levels[static_cast<std::size_t>(k) + 1];
    const double t = static_cast<double>(k) * h;

    // Gather per-node step data: means, stds per dimension, covariance terms.
    const std::size_t n_nodes = wcur.size();
    std::vector<double> mu(n_nodes * static_cast<std::size_t>(d));
    std::vector<double> sd(n_nodes * static_cast<std::size_t>(d));
    std::vector<double> rho12(n_nodes, 0.0);  // d = 2 correlated case
    bool orthogonal = true;

    {
      NodeIterator it(szs);
      std::size_t node = 0;
      for (; !it.done; it.next(), ++node) {
        for (int l = 0; l < d; ++l) {
          x[static_cast<std::size_t>(l)] =
              gcur[static_cast<std::size_t>(l)]
                  .points[static_cast<std::size_t>(it.idx[static_cast<std::size_t>(l)])];
        }
        spec.drift(t, x, bvec);
        spec.diffusion(t, x, sig);
        for (int l = 0; l < d; ++l) {
          double row2 = 0.0;
          for (int j = 0; j < spec.q; ++j) {
            const double v = sig[static_cast<std::size_t>(l * spec.q + j)];
            row2 += v * v;
          }
          mu[node * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)] =
              x[static_cast<std::size_t>(l)] + h * bvec[static_cast<std::size_t>(l)];
          sd[node * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)] =
              sqh * std::sqrt(row2);
        }
        // Orthogonality of diffusion rows (pairwise dot products).
        for (int l = 0; l < d && orthogonal; ++l) {
          for (int m = l + 1; m < d; ++m) {
            double dot = 0.0, nl = 0.0, nm = 0.0;
            for (int j = 0; j < spec.q; ++j) {
              const double a = sig[static_cast<std::size_t>(l * spec.q + j)];
              const double b = sig[static_cast<std::size_t>(m * spec.q + j)];
              dot += a * b;
              nl += a * a;
              nm += b * b;
            }
            if (std::abs(dot) > 1e-14 * std::sqrt(std::max(nl * nm, 1e-300))) {
              orthogonal = false;
              if (d == 2) {
                rho12[node] = dot / std::sqrt(nl * nm);
              }
            } else if (d == 2) {
              rho12[node] = 0.0;
            }
          }
        }
        if (!orthogonal && d == 2) {
          // still need rho for the remaining nodes; recompute below.
        }
      }
    }
    if (!orthogonal && d > 2) {
      throw std::invalid_argument(
          "product_quantize: correlated diffusion rows unsupported for d > 2");
    }
    if (!orthogonal) {
      // Fill rho for every node (the flag may have flipped mid-scan).
      NodeIterator it(szs);
      std::size_t node = 0;
      for (; !it.done; it.next(), ++node) {
        for (int l = 0; l < d; ++l) {
          x[static_cast<std::size_t>(l)] =
              gcur[static_cast<std::size_t>(l)]
                  .points[static_cast<std::size_t>(it.idx[static_cast<std::size_t>(l)])];
        }
        spec.diffusion(t, x, sig);
        double dot = 0.0, nl = 0.0, nm = 0.0;
        for (int j = 0; j < spec.q; ++j) {
          const double a = sig[static_cast<std::size_t>(j)];
          const double b = sig[static_cast<std::size_t>(spec.q + j)];
          dot += a * b;
          nl += a * a;
          nm += b * b;
        }
        rho12[node] = (nl > 0.0 && nm > 0.0) ? dot / std::sqrt(nl * nm) : 0.0;
      }
    }

    // Optimize each marginal grid on its node-weighted Gaussian mixture.
    auto& gnew = chain.grids[static_cast<std::size_t>(k) + 1];
    gnew.resize(static_cast<std::size_t>(d));
    for (int l = 0; l < d; ++l) {
      std::vector<GaussianComponent> comps;
      comps.reserve(n_nodes);
      for (std::size_t node = 0; node < n_nodes; ++node) {
        comps.push_back({wcur[node],
                         mu[node * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)],
                         sd[node * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)]});
      }
      const LawView view = law_view(ScalarLaw::mixture(std::move(comps)));
      OptimizeResult res =
          newton_optimize(view, nxt[static_cast<std::size_t>(l)], nullptr, options);
      gnew[static_cast<std::size_t>(l)] = std::move(res.grid);
    }

    // Propagate node weights through per-node rectangle probabilities.
    std::size_t n_new = 1;
    for (int l = 0; l < d; ++l) n_new *= static_cast<std::size_t>(nxt[static_cast<std::size_t>(l)]);
    std::vector<double>& wnew = chain.node_weights[static_cast<std::size_t>(k) + 1];
    wnew.assign(n_new, 0.0);

    std::vector<std::vector<double>> hps(static_cast<std::size_t>(d));
    for (int l = 0; l < d; ++l) {
      hps[static_cast<std::size_t>(l)] = gnew[static_cast<std::size_t>(l)].half_points();
    }

    if (orthogonal) {
      // Per-dimension cdf differences multiply across dimensions.
      std::vector<std::vector<double>> cell_p(static_cast<std::size_t>(d));
      for (std::size_t node = 0; node < n_nodes; ++node) {
        if (wcur[node] == 0.0) continue;
        for (int l = 0; l < d; ++l) {
          const double m = mu[node * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)];
          const double s = sd[node * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)];
          const auto& hp = hps[static_cast<std::size_t>(l)];
          auto& cp = cell_p[static_cast<std::size_t>(l)];
          cp.assign(hp.size() - 1, 0.0);
          double prevF = 0.0;
          for (std::size_t j = 0; j < hp.size(); ++j) {
            double F;
            if (s == 0.0) {
              F = (hp[j] >= m) ? 1.0 : 0.0;  // atom convention: mass at cell with m <= right
            } else {
              F = (hp[j] == kInf) ? 1.0
                                  : ((hp[j] == -kInf) ? 0.0 : std_normal_cdf((hp[j] - m) / s));
            }
            if (j > 0) cp[j - 1] = std::max(0.0, F - prevF);
            prevF = F;
          }
        }
        NodeIterator jt(nxt);
        for (; !jt.done; jt.next()) {
          double p = wcur[node];
          for (int l = 0; l < d; ++l) {
            p *= cell_p[static_cast<std::size_t>(l)]
                       [static_cast<std::size_t>(jt.idx[static_cast<std::size_t>(l)])];
          }
          if (p != 0.0) wnew[flat_index(jt.idx, nxt)] += p;
        }
      }
    } else {
      // d == 2 with correlation: bivariate rectangle probabilities.
      for (std::size_t node = 0; node < n_nodes; ++node) {
        if (wcur[node] == 0.0) continue;
        const double m1 = mu[node * 2], m2 = mu[node * 2 + 1];
        const double s1 = sd[node * 2], s2 = sd[node * 2 + 1];
        BivariateCdf phi2(rho12[node]);
        const auto& hp1 = hps[0];
        const auto& hp2 = hps[1];
        auto norm1 = [&](double y) {
          return (y == kInf || y == -kInf || s1 == 0.0)
                     ? ((s1 == 0.0) ? ((y >= m1) ? kInf : -kInf) : y)
                     : (y - m1) / s1;
        };
        auto norm2 = [&](double y) {
          return (y == kInf || y == -kInf || s2 == 0.0)
                     ? ((s2 == 0.0) ? ((y >= m2) ? kInf : -kInf) : y)
                     : (y - m2) / s2;
        };
        // Cache cdf values on the half-point lattice.
        std::vector<double> Fgrid(hp1.size() * hp2.size());
        for (std::size_t a = 0; a < hp1.size(); ++a) {
          const double b1 = norm1(hp1[a]);
          for (std::size_t b = 0; b < hp2.size(); ++b) {
            Fgrid[a * hp2.size() + b] = phi2(b1, norm2(hp2[b]));
          }
        }
        for (std::size_t i = 0; i + 1 < hp1.size(); ++i) {
          for (std::size_t j = 0; j + 1 < hp2.size(); ++j) {
            const double p = Fgrid[(i + 1) * hp2.size() + (j + 1)] -
                             Fgrid[i * hp2.size() + (j + 1)] -
                             Fgrid[(i + 1) * hp2.size() + j] + Fgrid[i * hp2.size() + j];
            if (p > 0.0) {
              wnew[i * static_cast<std::size_t>(nxt[1]) + j] += wcur[node] * p;
            }
          }
        }
      }
    }
  }
  return chain;
}

}  // namespace recq
