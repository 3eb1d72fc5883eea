/*
 * gdlab C API: guided-diffusion sampling on analytic Gaussian-mixture priors.
 *
 * All functions return gdlab_status; on failure gdlab_last_error() gives a
 * thread-local message. Handles are opaque and freed with the matching
 * *_free function. Output buffers are caller-allocated; sizes are stated per
 * function. The library is thread-safe: handles are immutable after
 * creation and may be shared across threads.
 */
#ifndef GDLAB_H
#define GDLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GDLAB_API __declspec(dllexport)
#else
#define GDLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gdlab_status {
  GDLAB_OK = 0,
  /* Invalid configuration or malformed input. CLI exit code 2. */
  GDLAB_ERROR_CONFIG = 2,
  /* Numerical failure: NaN state, non-convergence, degenerate data. Exit 3. */
  GDLAB_ERROR_NUMERIC = 3,
  /* Contract violation: null pointer, bad dimension, bad enum value. */
  GDLAB_ERROR_INVALID_ARGUMENT = 4
} gdlab_status;

typedef struct gdlab_gmm gdlab_gmm;
typedef struct gdlab_schedule gdlab_schedule;

GDLAB_API const char *gdlab_version(void);

/* Message for the most recent failure on the calling thread. */
GDLAB_API const char *gdlab_last_error(void);

/* ---- Gaussian-mixture priors ---- */

/* JSON spec: {"dim": n, "components": [{"weight": w, "mean": [...],
 * "var": [...]}, ...]}. Weights must sum to 1; variances are diagonal. */
GDLAB_API gdlab_status gdlab_gmm_from_json(const char *json_text, gdlab_gmm **out);

/* Built-in priors: "doublewell2d", "gauss1d". */
GDLAB_API gdlab_status gdlab_gmm_from_preset(const char *name, gdlab_gmm **out);

GDLAB_API void gdlab_gmm_free(gdlab_gmm *gmm);

GDLAB_API size_t gdlab_gmm_dim(const gdlab_gmm *gmm);

typedef enum gdlab_noise_kind {
  GDLAB_NOISE_ISOTROPIC = 0, /* noise points at one value, sigma^2        */
  GDLAB_NOISE_DIAGONAL = 1   /* noise points at dim per-coordinate values */
} gdlab_noise_kind;

/* Log-density, score and Hessian of the mixture convolved with the given
 * noise, evaluated at x (length dim). Any of the three outputs may be NULL;
 * score has length dim, hessian is row-major dim*dim. */
GDLAB_API gdlab_status gdlab_gmm_eval(const gdlab_gmm *gmm, const double *x, size_t dim,
                                      gdlab_noise_kind kind, const double *noise,
                                      double *log_density, double *score, double *hessian);

/* n ancestral draws from the prior into out (n*dim doubles, row-major). */
GDLAB_API gdlab_status gdlab_gmm_sample(const gdlab_gmm *gmm, uint64_t seed, size_t n,
                                        double *out);

/* ---- Noise schedules ---- */

GDLAB_API gdlab_status gdlab_schedule_vp_linear(size_t steps, double beta_min, double beta_max,
                                                gdlab_schedule **out);
GDLAB_API gdlab_status gdlab_schedule_ve_geometric(size_t steps, double sigma_min,
                                                   double sigma_max, gdlab_schedule **out);
GDLAB_API void gdlab_schedule_free(gdlab_schedule *schedule);
GDLAB_API size_t gdlab_schedule_steps(const gdlab_schedule *schedule);

/* VE-equivalent sigma at step t in [1, steps]. */
GDLAB_API gdlab_status gdlab_schedule_sigma(const gdlab_schedule *schedule, size_t t,
                                            double *out);

/* ---- Posterior-score evaluations (VE coordinates) ---- */

/* Exact denoising posterior score at x_t for measurement y with noise
 * sigma_y, diffusion level sigma_t. posterior/prior_term/guidance_term each
 * have length dim; prior_term and guidance_term may be NULL. */
GDLAB_API gdlab_status gdlab_denoising_score(const gdlab_gmm *gmm, const double *x_t,
                                             const double *y, size_t dim, double sigma_y,
                                             double sigma_t, double *posterior,
                                             double *prior_term, double *guidance_term);

/* Exact inpainting posterior score; mask entries are 0/1, sigma_y >= 0. */
GDLAB_API gdlab_status gdlab_inpainting_score(const gdlab_gmm *gmm, const double *x_t,
                                              const int32_t *mask, const double *y, size_t dim,
                                              double sigma_y, double sigma_t, double *posterior,
                                              double *prior_term, double *guidance_term);

/* Tweedie posterior-mean estimate xhat0 = x_t + sigma_t^2 score(x_t). */
GDLAB_API gdlab_status gdlab_tweedie_mean(const gdlab_gmm *gmm, const double *x_t, size_t dim,
                                          double sigma_t, double *out);

/* Least-squares DPS step size for the denoising (mask == NULL) or masked
 * reference task. degenerate is set to 1 when the reference score vanishes
 * and w is 0. enhanced != 0 scales by sqrt(dim / observed). */
GDLAB_API gdlab_status gdlab_dps_w_weight(const gdlab_gmm *gmm, const double *x_t,
                                          const double *y, size_t dim, const int32_t *mask,
                                          double sigma_y, double sigma_t, int enhanced,
                                          double *w, int *degenerate);

/* ---- Experiment runner ---- */

/* Validates a run configuration (JSON text). */
GDLAB_API gdlab_status gdlab_validate_config(const char *config_json);

/* Executes the configured task (sample | umbrella | diagnose | curves) and
 * writes its CSV outputs plus manifest.json under the configured output
 * directory. When summary is non-NULL it receives a NUL-terminated
 * human-readable result (truncated to summary_len). */
GDLAB_API gdlab_status gdlab_run_config(const char *config_json, char *summary,
                                        size_t summary_len);

#ifdef __cplusplus
}
#endif

#endif /* GDLAB_H */
