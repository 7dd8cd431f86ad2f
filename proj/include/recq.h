/* C interface to the recursive-quantization library.
 *
 * All functions returning int yield a status code:
 *   0  success
 *   1  internal error
 *   2  configuration/argument error
 *   3  quantizer convergence failure
 *   4  I/O error
 * On failure, recq_last_error() returns a thread-local message describing it.
 * Objects are created through recq_*_new/from_* functions and must be released
 * with the matching recq_*_free; handles are opaque.
 */
#ifndef RECQ_H
#define RECQ_H

#ifdef __cplusplus
extern "C" {
#endif

#define RECQ_OK 0
#define RECQ_ERR_INTERNAL 1
#define RECQ_ERR_CONFIG 2
#define RECQ_ERR_CONVERGENCE 3
#define RECQ_ERR_IO 4

typedef struct recq_scheme recq_scheme;
typedef struct recq_chain recq_chain;

const char* recq_version(void);

/* Thread-local message for the most recent failure in this thread. */
const char* recq_last_error(void);

/* Chain step at which the most recent convergence failure occurred in this
 * thread, or -1 when not applicable. */
int recq_last_error_step(void);

/* ---- schemes ---- */

/* Builds a scheme (plus levels, quantizer options, put/MC/bounds parameters)
 * from a JSON job document. */
int recq_scheme_from_json(const char* json_text, recq_scheme** out);
void recq_scheme_free(recq_scheme* s);

int recq_scheme_steps(const recq_scheme* s, int* out);          /* n */
int recq_scheme_level(const recq_scheme* s, int k, int* out);   /* config N_k */
int recq_scheme_step_size(const recq_scheme* s, double* out);   /* h */
int recq_scheme_x0(const recq_scheme* s, double* out);

/* Put parameters from the config; status 2 if the config had no put block. */
int recq_scheme_put(const recq_scheme* s, double* strike, double* rate,
                    double* maturity, double* spot);
int recq_scheme_mc(const recq_scheme* s, long long* paths,
                   unsigned long long* seed);

/* ---- quantization ---- */

/* Runs the recursive quantization with the config's levels and options. */
int recq_quantize(const recq_scheme* s, recq_chain** out);

/* Same with an explicit per-step level list (n_levels = n+1 entries). */
int recq_quantize_levels(const recq_scheme* s, const int* levels, int n_levels,
                         recq_chain** out);
void recq_chain_free(recq_chain* c);

int recq_chain_steps(const recq_chain* c, int* out);
int recq_chain_level(const recq_chain* c, int k, int* out);
/* points/weights must hold recq_chain_level(k) doubles. */
int recq_chain_grid(const recq_chain* c, int k, double* points, double* weights);
/* p must hold N_k * N_{k+1} doubles (row-major); k in [0, n). */
int recq_chain_transition(const recq_chain* c, int k, double* p);
int recq_chain_mean(const recq_chain* c, int k, double* out);
int recq_chain_variance(const recq_chain* c, int k, double* out);
/* Newton report for the step that produced grid k (k >= 1). */
int recq_chain_report(const recq_chain* c, int k, int* newton_iters,
                      int* lloyd_iters, double* grad_sup, int* used_fallback,
                      double* distortion);
/* Density rows over grid k: arrays must hold N_k - 2 doubles; k's level >= 3. */
int recq_chain_density(const recq_chain* c, int k, double* left, double* right,
                       double* value);

int recq_chain_save(const recq_chain* c, const char* dir);
int recq_chain_load(const char* dir, recq_chain** out);

/* ---- pricing ---- */

int recq_bs_put(double x, double sigma, double r, double tau, double K,
                double* out);
int recq_merton_put(double x0, double sigma, double r, double T, double lambda,
                    double theta, double K, double tail_tol, double* out);
/* Closed form matching the scheme: Merton series for lognormal-jump schemes,
 * Black-Scholes for plain Euler with proportional coefficients. */
int recq_closed_put(const recq_scheme* s, double strike, double rate,
                    double maturity, double tail_tol, double* out);
int recq_equivalent_bs_vol(double sigma, double lambda, double theta,
                           double* out);
int recq_quantized_put(const recq_chain* c, double strike, double rate,
                       double maturity, double* out);

/* ---- Monte-Carlo oracle ---- */

/* terminal must hold `paths` doubles. */
int recq_mc_terminal(const recq_scheme* s, long long paths,
                     unsigned long long seed, double* terminal);
int recq_mc_moments(const recq_scheme* s, long long paths,
                    unsigned long long seed, double* mean, double* mean_se,
                    double* variance, double* variance_se);
int recq_mc_put(const recq_scheme* s, long long paths, unsigned long long seed,
                double strike, double rate, double maturity, double* price,
                double* se);

/* ---- error-bound evaluators ---- */

/* Arrays alpha/beta/lip have n_coeff >= k+1 entries (index 0 is the initial
 * condition; beta[0]/lip[0] are unused). levels has n_levels >= k+1 entries.
 * c_p <= 0 selects the default (c_dp) for the product bound. */
int recq_regular_bound(double p, int d, double c_dp, const double* alpha,
                       const double* beta, const double* lip, int n_coeff,
                       const int* levels, int n_levels, int k, double* out);
int recq_product_bound(double p, int d, double c_dp, double c_p,
                       const double* alpha, const double* beta,
                       const double* lip, int n_coeff, const int* levels,
                       int n_levels, int k, double* out);
int recq_step_bound(double C0, double C1, double C2, double T, int n,
                    double x0_norm_p, double c_dp, double p, int d,
                    const int* levels, int n_levels, int k, double* out);
int recq_weak_error_bound(double grad_f_lip, double f_lip, double C,
                          double Cprime, double h, const double* sq_errors,
                          int n_err, int k, double* out);
int recq_key_lemma_coeffs(double lin_growth, double upsilon,
                          double innovation_abs_p, double p, double h,
                          double* kappa_p, double* K_p, double* alpha,
                          double* beta);
/* Per-step Lipschitz constant of the scheme map, from the config's
 * bounds.lipschitz constants. */
int recq_scheme_lipschitz(const recq_scheme* s, double* out);
/* kind: 0 = euler, 1 = milstein, 2 = jump euler. */
int recq_propagation_constants(int kind, double b1_sup, double b2_sup,
                               double s1_sup, double ssig2_sup, double g1_sup,
                               double g2_sup, double gg2_sup, double jump_mean,
                               double jump_second, double lambda, double T,
                               double* C, double* Cprime);

/* Bound-evaluation constants from the config's bounds block (defaults if the
 * block was absent). Any output pointer may be NULL. */
int recq_scheme_bound_params(const recq_scheme* s, double* p, int* d,
                             double* c_dp, double* c_p, double* lin_growth,
                             double* upsilon, double* innovation_abs_p,
                             double* x0_norm_p);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RECQ_H */
