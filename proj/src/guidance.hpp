#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gmm.hpp"
#include "operators.hpp"

namespace gdlab {

enum class GuidanceMethod { Unconditional, ExactPosterior, Dps, DpsW };

struct GuidanceSpec {
  GuidanceMethod method = GuidanceMethod::Unconditional;
  // DPS step size: zeta_t = zeta_prime (constant) or
  // zeta_t = zeta_prime / ||y - A xhat0|| when residual_scaled is set.
  double zeta_prime = 1.0;
  bool residual_scaled = false;
  // DPS-w only; scales w_t by sqrt(d / d_observed). Valid with mask operators.
  bool enhanced = false;
};

// Posterior score split into its two summands:
// posterior_score = prior_term + guidance_term, componentwise.
struct GuidanceOutput {
  std::vector<double> posterior_score;
  std::vector<double> prior_term;
  std::vector<double> guidance_term;
  std::optional<double> w_t;
};

/*
 * Exact noise-perturbed posterior score for pure denoising (A = I),
 * VE coordinates:
 *
 *   grad log p_t(x_t | y) = sigma_t^-2 sigma_tilde^2 * s(x_tilde, sigma_tilde)
 *                           - (sigma_y^2 + sigma_t^2)^-1 (x_t - y),
 *
 * where s is the perturbed prior score and (x_tilde, sigma_tilde) come from
 * tilde_params. The first summand is prior_term, the second guidance_term.
 */
GuidanceOutput exact_denoising_score(const GaussianMixture& gmm, std::span<const double> x_t,
                                     std::span<const double> y, double sigma_y, double sigma_t);

/*
 * Exact posterior score for inpainting, A = diag(mask):
 *
 *   grad log p_t(x_t | y) = sigma_t^-2 Sigma_tilde * s_Sigma(x_tilde)
 *                           - (sigma_y^2 + sigma_t^2)^-1 A (x_t - y),
 *
 * with Sigma_tilde = (sigma_y^-2 A + sigma_t^-2 I)^-1 diagonal and s_Sigma
 * the score of the prior convolved with the non-isotropic noise Sigma_tilde.
 * sigma_y = 0 is the noiseless limit: observed coordinates carry exactly
 * -sigma_t^-2 A (x_t - y).
 */
GuidanceOutput exact_inpainting_score(const GaussianMixture& gmm, std::span<const double> x_t,
                                      std::span<const int> mask, std::span<const double> y,
                                      double sigma_y, double sigma_t);

/*
 * General pre-limit form for an invertible diagonal operator A = diag(d):
 *
 *   prior_term    = sigma_t^-2 (sigma_y^-2 A^T A + sigma_t^-2 I)^-1 * s_Sigma(mu)
 *   guidance_term = -(sigma_y^2 (A^T A)^-1 + sigma_t^2 I)^-1 (x_t - A^-1 y)
 *
 * with Sigma = (sigma_y^-2 A^T A + sigma_t^-2 I)^-1 and
 * mu = Sigma (sigma_y^-2 A^T y + sigma_t^-2 x_t). Reduces to the denoising
 * form at d = 1 and to the inpainting form as entries of d go to 0.
 */
GuidanceOutput exact_invertible_score(const GaussianMixture& gmm, std::span<const double> x_t,
                                      std::span<const double> d, std::span<const double> y,
                                      double sigma_y, double sigma_t);

// MMSE estimate of the clean point: xhat0 = x_t + sigma_t^2 * s(x_t, sigma_t).
std::vector<double> tweedie_mean_ve(const GaussianMixture& gmm, std::span<const double> x_t,
                                    double sigma_t);

// VP form: xhat0 = (x_t + (1 - alphabar) * s_vp(x_t)) / sqrt(alphabar).
// Numerically evaluated through the VE form at the converted coordinates.
std::vector<double> tweedie_mean_vp(const GaussianMixture& gmm, std::span<const double> x_t,
                                    double alphabar);

// grad_{x_t} ||y - A xhat0(x_t)||^2, expanded with the analytic Tweedie
// Jacobian J = I + sigma_t^2 H(x_t): grad = -2 J^T A^T (y - A xhat0).
std::vector<double> dps_residual_gradient_ve(const GaussianMixture& gmm,
                                             std::span<const double> x_t,
                                             const Measurement& measurement, double sigma_t);

// Gradient plus the residual norm ||y - A xhat0|| it was built from.
struct DpsParts {
  std::vector<double> gradient;
  double residual_norm = 0.0;
};

DpsParts dps_residual_parts_ve(const GaussianMixture& gmm, std::span<const double> x_t,
                               const Measurement& measurement, double sigma_t);

// s_DPS = -zeta_t * grad_{x_t} ||y - A xhat0||^2.
std::vector<double> dps_score_ve(const GaussianMixture& gmm, std::span<const double> x_t,
                                 const Measurement& measurement, double sigma_t, double zeta_t);

/*
 * Exact noisy likelihood score for denoising,
 *
 *   grad log p_t(y | x_t) = sigma_t^-2 sigma_tilde^2 s(x_tilde, sigma_tilde)
 *                           - s(x_t, sigma_t)
 *                           - (sigma_y^2 + sigma_t^2)^-1 (x_t - y),
 *
 * i.e. the exact denoising posterior score minus the unconditional score.
 */
std::vector<double> exact_noisy_likelihood_score(const GaussianMixture& gmm,
                                                 std::span<const double> x_t,
                                                 std::span<const double> y, double sigma_y,
                                                 double sigma_t);

struct DpsWeight {
  double w = 0.0;
  // True when ||s_ref|| = 0 and the projection is undefined; w is 0 then.
  bool degenerate = false;
};

/*
 * Least-squares step size for DPS on a reference task:
 *
 *   w_t = <s_exact, s_ref> / ||s_ref||^2,
 *
 * where s_exact is the exact noisy likelihood score for the reference
 * measurement and s_ref is the DPS score with zeta_t = 1. The reference
 * operator must be identity (denoising) or a mask (inpainting); with a mask
 * both vectors are projected onto observed coordinates first. `enhanced`
 * multiplies by sqrt(d / d_observed).
 */
DpsWeight dps_w_weight(const GaussianMixture& gmm, std::span<const double> x_t,
                       const Measurement& reference, double sigma_t, bool enhanced);

// --- VP-space entry points (Appendix-style change of variables) ---
//
// A VP state x_t at level alphabar maps to the VE state u = x_t / sqrt(alphabar)
// at sigma^2 = (1 - alphabar) / alphabar, and VP-space gradients are the VE
// gradients scaled by 1 / sqrt(alphabar). One code path, two conventions.

std::vector<double> prior_score_vp(const GaussianMixture& gmm, std::span<const double> x_t,
                                   double alphabar);

GuidanceOutput exact_denoising_score_vp(const GaussianMixture& gmm, std::span<const double> x_t,
                                        std::span<const double> y, double sigma_y,
                                        double alphabar);

GuidanceOutput exact_inpainting_score_vp(const GaussianMixture& gmm, std::span<const double> x_t,
                                         std::span<const int> mask, std::span<const double> y,
                                         double sigma_y, double alphabar);

std::vector<double> dps_residual_gradient_vp(const GaussianMixture& gmm,
                                             std::span<const double> x_t,
                                             const Measurement& measurement, double alphabar);

}  // namespace gdlab
