#include "recq.h"

#include <cstdint>
#include <cstring>
#include <exception>
#include <ios>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "recq/config.hpp"
#include "recq/error_bounds.hpp"
#include "recq/io.hpp"
#include "recq/mc_oracle.hpp"
#include "recq/pricing.hpp"
#include "recq/quantizer1d.hpp"
#include "recq/recursive_engine.hpp"
#include "recq/schemes.hpp"

struct recq_scheme {
  recq::ParsedConfig cfg;
  recq::PreparedScheme prep;
};

struct recq_chain {
  recq::QuantizedChain chain;
};

namespace {

thread_local std::string g_last_error;
thread_local int g_last_error_step = -1;

int set_error(int code, const std::string& msg) {
  g_last_error = msg;
  g_last_error_step = -1;
  return code;
}

template <class Fn>
int wrap(Fn&& fn) {
  try {
    return fn();
  } catch (const recq::ConfigError& e) {
    return set_error(RECQ_ERR_CONFIG, e.what());
  } catch (const recq::ConvergenceError& e) {
    const int rc = set_error(RECQ_ERR_CONVERGENCE, e.what());
    g_last_error_step = e.step_index;
    return rc;
  } catch (const recq::IoError& e) {
    return set_error(RECQ_ERR_IO, e.what());
  } catch (const std::ios_base::failure& e) {
    return set_error(RECQ_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(RECQ_ERR_CONFIG, e.what());
  } catch (const std::domain_error& e) {
    return set_error(RECQ_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RECQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RECQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(RECQ_ERR_INTERNAL, "unknown error");
  }
}

int require_ptr(const void* p, const char* what) {
  if (p == nullptr) {
    set_error(RECQ_ERR_CONFIG, std::string("null pointer: ") + what);
    return RECQ_ERR_CONFIG;
  }
  return RECQ_OK;
}

int check_chain_step(const recq_chain* c, int k, bool transition) {
  const int n = static_cast<int>(c->chain.grids.size()) - 1;
  const int hi = transition ? n - 1 : n;
  if (k < 0 || k > hi) {
    return set_error(RECQ_ERR_CONFIG, "step index out of range");
  }
  return RECQ_OK;
}

}  // namespace

extern "C" {

const char* recq_version(void) { return "1.0.0"; }

const char* recq_last_error(void) { return g_last_error.c_str(); }

int recq_last_error_step(void) { return g_last_error_step; }

int recq_scheme_from_json(const char* json_text, recq_scheme** out) {
  if (require_ptr(json_text, "json_text") || require_ptr(out, "out")) {
    return RECQ_ERR_CONFIG;
  }
  return wrap([&] {
    auto s = std::make_unique<recq_scheme>();
    s->cfg = recq::parse_config_json(json_text);
    s->prep = recq::prepare_scheme(s->cfg.scheme);
    *out = s.release();
    return RECQ_OK;
  });
}

void recq_scheme_free(recq_scheme* s) { delete s; }

int recq_scheme_steps(const recq_scheme* s, int* out) {
  if (require_ptr(s, "scheme") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  *out = s->cfg.scheme.n;
  return RECQ_OK;
}

int recq_scheme_level(const recq_scheme* s, int k, int* out) {
  if (require_ptr(s, "scheme") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  if (k < 0 || k >= static_cast<int>(s->cfg.levels.size())) {
    return set_error(RECQ_ERR_CONFIG, "step index out of range");
  }
  *out = s->cfg.levels[static_cast<std::size_t>(k)];
  return RECQ_OK;
}

int recq_scheme_step_size(const recq_scheme* s, double* out) {
  if (require_ptr(s, "scheme") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  *out = s->prep.h;
  return RECQ_OK;
}

int recq_scheme_x0(const recq_scheme* s, double* out) {
  if (require_ptr(s, "scheme") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  *out = s->cfg.scheme.x0;
  return RECQ_OK;
}

int recq_scheme_put(const recq_scheme* s, double* strike, double* rate,
                    double* maturity, double* spot) {
  if (require_ptr(s, "scheme")) return RECQ_ERR_CONFIG;
  if (!s->cfg.has_put) return set_error(RECQ_ERR_CONFIG, "config has no put block");
  if (strike) *strike = s->cfg.put.strike;
  if (rate) *rate = s->cfg.put.rate;
  if (maturity) *maturity = s->cfg.put.maturity;
  if (spot) *spot = s->cfg.put.spot;
  return RECQ_OK;
}

int recq_scheme_mc(const recq_scheme* s, long long* paths, unsigned long long* seed) {
  if (require_ptr(s, "scheme")) return RECQ_ERR_CONFIG;
  if (paths) *paths = static_cast<long long>(s->cfg.mc_paths);
  if (seed) *seed = static_cast<unsigned long long>(s->cfg.mc_seed);
  return RECQ_OK;
}

int recq_quantize(const recq_scheme* s, recq_chain** out) {
  if (require_ptr(s, "scheme") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    auto c = std::make_unique<recq_chain>();
    c->chain = recq::recursive_quantize(s->prep, s->cfg.levels, s->cfg.quantizer);
    *out = c.release();
    return RECQ_OK;
  });
}

int recq_quantize_levels(const recq_scheme* s, const int* levels, int n_levels,
                         recq_chain** out) {
  if (require_ptr(s, "scheme") || require_ptr(levels, "levels") ||
      require_ptr(out, "out")) {
    return RECQ_ERR_CONFIG;
  }
  return wrap([&] {
    std::vector<int> lv(levels, levels + n_levels);
    auto c = std::make_unique<recq_chain>();
    c->chain = recq::recursive_quantize(s->prep, lv, s->cfg.quantizer);
    *out = c.release();
    return RECQ_OK;
  });
}

void recq_chain_free(recq_chain* c) { delete c; }

int recq_chain_steps(const recq_chain* c, int* out) {
  if (require_ptr(c, "chain") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  *out = static_cast<int>(c->chain.grids.size()) - 1;
  return RECQ_OK;
}

int recq_chain_level(const recq_chain* c, int k, int* out) {
  if (require_ptr(c, "chain") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  if (int rc = check_chain_step(c, k, false)) return rc;
  *out = static_cast<int>(c->chain.grids[static_cast<std::size_t>(k)].points.size());
  return RECQ_OK;
}

int recq_chain_grid(const recq_chain* c, int k, double* points, double* weights) {
  if (require_ptr(c, "chain")) return RECQ_ERR_CONFIG;
  if (int rc = check_chain_step(c, k, false)) return rc;
  const auto& g = c->chain.grids[static_cast<std::size_t>(k)].points;
  const auto& w = c->chain.marginal_weights[static_cast<std::size_t>(k)];
  if (points) std::memcpy(points, g.data(), g.size() * sizeof(double));
  if (weights) std::memcpy(weights, w.data(), w.size() * sizeof(double));
  return RECQ_OK;
}

int recq_chain_transition(const recq_chain* c, int k, double* p) {
  if (require_ptr(c, "chain") || require_ptr(p, "p")) return RECQ_ERR_CONFIG;
  if (int rc = check_chain_step(c, k, true)) return rc;
  const auto& tr = c->chain.transitions[static_cast<std::size_t>(k)];
  std::memcpy(p, tr.data(), tr.size() * sizeof(double));
  return RECQ_OK;
}

int recq_chain_mean(const recq_chain* c, int k, double* out) {
  if (require_ptr(c, "chain") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  if (int rc = check_chain_step(c, k, false)) return rc;
  return wrap([&] {
    *out = recq::chain_mean(c->chain, k);
    return RECQ_OK;
  });
}

int recq_chain_variance(const recq_chain* c, int k, double* out) {
  if (require_ptr(c, "chain") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  if (int rc = check_chain_step(c, k, false)) return rc;
  return wrap([&] {
    *out = recq::chain_variance(c->chain, k);
    return RECQ_OK;
  });
}

int recq_chain_report(const recq_chain* c, int k, int* newton_iters, int* lloyd_iters,
                      double* grad_sup, int* used_fallback, double* distortion) {
  if (require_ptr(c, "chain")) return RECQ_ERR_CONFIG;
  if (int rc = check_chain_step(c, k, false)) return rc;
  if (k < 1) return set_error(RECQ_ERR_CONFIG, "reports start at step 1");
  const auto& r = c->chain.reports[static_cast<std::size_t>(k)];
  if (newton_iters) *newton_iters = r.iterations;
  if (lloyd_iters) *lloyd_iters = r.lloyd_iterations;
  if (grad_sup) *grad_sup = r.grad_sup_norm;
  if (used_fallback) *used_fallback = r.used_fallback ? 1 : 0;
  if (distortion) *distortion = r.distortion;
  return RECQ_OK;
}

int recq_chain_density(const recq_chain* c, int k, double* left, double* right,
                       double* value) {
  if (require_ptr(c, "chain") || require_ptr(left, "left") ||
      require_ptr(right, "right") || require_ptr(value, "value")) {
    return RECQ_ERR_CONFIG;
  }
  if (int rc = check_chain_step(c, k, false)) return rc;
  return wrap([&] {
    const auto rows = recq::density_estimate(
        c->chain.grids[static_cast<std::size_t>(k)],
        c->chain.marginal_weights[static_cast<std::size_t>(k)]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      left[i] = rows[i].left;
      right[i] = rows[i].right;
      value[i] = rows[i].value;
    }
    return RECQ_OK;
  });
}

int recq_chain_save(const recq_chain* c, const char* dir) {
  if (require_ptr(c, "chain") || require_ptr(dir, "dir")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    recq::save_chain(c->chain, dir);
    return RECQ_OK;
  });
}

int recq_chain_load(const char* dir, recq_chain** out) {
  if (require_ptr(dir, "dir") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    auto c = std::make_unique<recq_chain>();
    c->chain = recq::load_chain(dir);
    *out = c.release();
    return RECQ_OK;
  });
}

int recq_bs_put(double x, double sigma, double r, double tau, double K, double* out) {
  if (require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    *out = recq::bs_put(x, sigma, r, tau, K);
    return RECQ_OK;
  });
}

int recq_merton_put(double x0, double sigma, double r, double T, double lambda,
                    double theta, double K, double tail_tol, double* out) {
  if (require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    *out = recq::merton_put_series(x0, sigma, r, T, lambda, theta, K, tail_tol);
    return RECQ_OK;
  });
}

int recq_closed_put(const recq_scheme* s, double strike, double rate, double maturity,
                    double tail_tol, double* out) {
  if (require_ptr(s, "scheme") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    const recq::SchemeSpec& spec = s->cfg.scheme;
    if (!(spec.x0 > 0.0)) {
      return set_error(RECQ_ERR_CONFIG, "closed form needs a positive spot");
    }
    const double sigma = spec.diffusion(0.0, spec.x0) / spec.x0;
    if (spec.kind == recq::SchemeKind::JumpEuler) {
      if (spec.size_law.kind != recq::JumpSizeKind::LognormalShift) {
        return set_error(RECQ_ERR_CONFIG,
                         "closed form needs lognormal-shift jump sizes");
      }
      *out = recq::merton_put_series(spec.x0, sigma, rate, maturity, spec.intensity,
                                     spec.size_law.theta, strike, tail_tol);
      return RECQ_OK;
    }
    if (spec.kind == recq::SchemeKind::Euler) {
      *out = recq::bs_put(spec.x0, sigma, rate, maturity, strike);
      return RECQ_OK;
    }
    return set_error(RECQ_ERR_CONFIG, "no closed form for this scheme kind");
  });
}

int recq_equivalent_bs_vol(double sigma, double lambda, double theta, double* out) {
  if (require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    *out = recq::equivalent_bs_vol(sigma, lambda, theta);
    return RECQ_OK;
  });
}

int recq_quantized_put(const recq_chain* c, double strike, double rate,
                       double maturity, double* out) {
  if (require_ptr(c, "chain") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    recq::PutSpec put;
    put.strike = strike;
    put.rate = rate;
    put.maturity = maturity;
    put.spot = 0.0;
    *out = recq::quantized_put(c->chain, put);
    return RECQ_OK;
  });
}

int recq_mc_terminal(const recq_scheme* s, long long paths, unsigned long long seed,
                     double* terminal) {
  if (require_ptr(s, "scheme") || require_ptr(terminal, "terminal")) {
    return RECQ_ERR_CONFIG;
  }
  return wrap([&] {
    const recq::PathBatch batch =
        recq::simulate_terminal(s->prep, static_cast<std::int64_t>(paths),
                                static_cast<std::uint64_t>(seed));
    std::memcpy(terminal, batch.terminal.data(), batch.terminal.size() * sizeof(double));
    return RECQ_OK;
  });
}

int recq_mc_moments(const recq_scheme* s, long long paths, unsigned long long seed,
                    double* mean, double* mean_se, double* variance,
                    double* variance_se) {
  if (require_ptr(s, "scheme")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    const recq::PathBatch batch =
        recq::simulate_terminal(s->prep, static_cast<std::int64_t>(paths),
                                static_cast<std::uint64_t>(seed));
    const recq::McEstimate m = recq::mc_mean(batch);
    const recq::McEstimate v = recq::mc_variance(batch);
    if (mean) *mean = m.value;
    if (mean_se) *mean_se = m.std_error;
    if (variance) *variance = v.value;
    if (variance_se) *variance_se = v.std_error;
    return RECQ_OK;
  });
}

int recq_mc_put(const recq_scheme* s, long long paths, unsigned long long seed,
                double strike, double rate, double maturity, double* price,
                double* se) {
  if (require_ptr(s, "scheme")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    const recq::PathBatch batch =
        recq::simulate_terminal(s->prep, static_cast<std::int64_t>(paths),
                                static_cast<std::uint64_t>(seed));
    recq::PutSpec put;
    put.strike = strike;
    put.rate = rate;
    put.maturity = maturity;
    put.spot = 0.0;
    const recq::McEstimate e = recq::mc_put(batch, put);
    if (price) *price = e.value;
    if (se) *se = e.std_error;
    return RECQ_OK;
  });
}

namespace {

int fill_coeffs(double p, int d, double c_dp, const double* alpha, const double* beta,
                const double* lip, int n_coeff, recq::BoundCoefficients* out) {
  if (n_coeff < 1) return set_error(RECQ_ERR_CONFIG, "need at least one coefficient");
  out->p = p;
  out->d = d;
  out->c_dp = c_dp;
  out->alpha.assign(alpha, alpha + n_coeff);
  out->beta.assign(beta, beta + n_coeff);
  out->lip.assign(lip, lip + n_coeff);
  return RECQ_OK;
}

}  // namespace

int recq_regular_bound(double p, int d, double c_dp, const double* alpha,
                       const double* beta, const double* lip, int n_coeff,
                       const int* levels, int n_levels, int k, double* out) {
  if (require_ptr(alpha, "alpha") || require_ptr(beta, "beta") ||
      require_ptr(lip, "lip") || require_ptr(levels, "levels") ||
      require_ptr(out, "out")) {
    return RECQ_ERR_CONFIG;
  }
  return wrap([&] {
    recq::BoundCoefficients c;
    if (int rc = fill_coeffs(p, d, c_dp, alpha, beta, lip, n_coeff, &c)) return rc;
    std::vector<int> lv(levels, levels + n_levels);
    *out = recq::regular_bound(c, lv, k);
    return RECQ_OK;
  });
}

int recq_product_bound(double p, int d, double c_dp, double c_p, const double* alpha,
                       const double* beta, const double* lip, int n_coeff,
                       const int* levels, int n_levels, int k, double* out) {
  if (require_ptr(alpha, "alpha") || require_ptr(beta, "beta") ||
      require_ptr(lip, "lip") || require_ptr(levels, "levels") ||
      require_ptr(out, "out")) {
    return RECQ_ERR_CONFIG;
  }
  return wrap([&] {
    recq::BoundCoefficients c;
    if (int rc = fill_coeffs(p, d, c_dp, alpha, beta, lip, n_coeff, &c)) return rc;
    if (c_p > 0.0) c.c_p = c_p;
    std::vector<int> lv(levels, levels + n_levels);
    *out = recq::product_bound(c, lv, k);
    return RECQ_OK;
  });
}

int recq_step_bound(double C0, double C1, double C2, double T, int n,
                    double x0_norm_p, double c_dp, double p, int d, const int* levels,
                    int n_levels, int k, double* out) {
  if (require_ptr(levels, "levels") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    std::vector<int> lv(levels, levels + n_levels);
    *out = recq::step_bound(C0, C1, C2, T, n, x0_norm_p, c_dp, p, d, lv, k);
    return RECQ_OK;
  });
}

int recq_weak_error_bound(double grad_f_lip, double f_lip, double C, double Cprime,
                          double h, const double* sq_errors, int n_err, int k,
                          double* out) {
  if (require_ptr(sq_errors, "sq_errors") || require_ptr(out, "out")) {
    return RECQ_ERR_CONFIG;
  }
  return wrap([&] {
    recq::WeakErrorParams w;
    w.grad_f_lip = grad_f_lip;
    w.f_lip = f_lip;
    w.C = C;
    w.Cprime = Cprime;
    w.h = h;
    w.sq_errors.assign(sq_errors, sq_errors + n_err);
    *out = recq::weak_error_bound(w, k);
    return RECQ_OK;
  });
}

int recq_key_lemma_coeffs(double lin_growth, double upsilon, double innovation_abs_p,
                          double p, double h, double* kappa_p, double* K_p,
                          double* alpha, double* beta) {
  return wrap([&] {
    recq::CoefficientInputs in;
    in.lin_growth = lin_growth;
    in.upsilon = upsilon;
    in.innovation_abs_p = innovation_abs_p;
    in.p = p;
    const recq::KeyLemmaCoeffs out = recq::key_lemma_coeffs(in, h);
    if (kappa_p) *kappa_p = out.kappa_p;
    if (K_p) *K_p = out.K_p;
    if (alpha) *alpha = out.alpha;
    if (beta) *beta = out.beta;
    return RECQ_OK;
  });
}

int recq_scheme_lipschitz(const recq_scheme* s, double* out) {
  if (require_ptr(s, "scheme") || require_ptr(out, "out")) return RECQ_ERR_CONFIG;
  return wrap([&] {
    *out = recq::scheme_lipschitz(s->cfg.scheme, s->cfg.lipschitz);
    return RECQ_OK;
  });
}

int recq_propagation_constants(int kind, double b1_sup, double b2_sup, double s1_sup,
                               double ssig2_sup, double g1_sup, double g2_sup,
                               double gg2_sup, double jump_mean, double jump_second,
                               double lambda, double T, double* C, double* Cprime) {
  return wrap([&] {
    recq::PropagationKind pk;
    switch (kind) {
      case 0: pk = recq::PropagationKind::Euler; break;
      case 1: pk = recq::PropagationKind::Milstein; break;
      case 2: pk = recq::PropagationKind::JumpEuler; break;
      default:
        return set_error(RECQ_ERR_CONFIG, "kind must be 0, 1, or 2");
    }
    recq::PropagationInputs in;
    in.b1_sup = b1_sup;
    in.b2_sup = b2_sup;
    in.s1_sup = s1_sup;
    in.ssig2_sup = ssig2_sup;
    in.g1_sup = g1_sup;
    in.g2_sup = g2_sup;
    in.gg2_sup = gg2_sup;
    in.jump_mean = jump_mean;
    in.jump_second = jump_second;
    in.lambda = lambda;
    in.T = T;
    const recq::PropagationConstants pc = recq::propagation_constants(pk, in);
    if (C) *C = pc.C;
    if (Cprime) *Cprime = pc.Cprime;
    return RECQ_OK;
  });
}

int recq_scheme_bound_params(const recq_scheme* s, double* p, int* d, double* c_dp,
                             double* c_p, double* lin_growth, double* upsilon,
                             double* innovation_abs_p, double* x0_norm_p) {
  if (require_ptr(s, "scheme")) return RECQ_ERR_CONFIG;
  if (p) *p = s->cfg.bounds_p;
  if (d) *d = s->cfg.bounds_d;
  if (c_dp) *c_dp = s->cfg.bounds_c_dp;
  if (c_p) *c_p = s->cfg.bounds_c_p;
  if (lin_growth) *lin_growth = s->cfg.lin_growth;
  if (upsilon) *upsilon = s->cfg.upsilon;
  if (innovation_abs_p) *innovation_abs_p = s->cfg.innovation_abs_p;
  if (x0_norm_p) *x0_norm_p = s->cfg.x0_norm_p;
  return RECQ_OK;
}

}  // extern "C"
