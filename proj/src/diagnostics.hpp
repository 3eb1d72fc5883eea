#pragma once

#include <cstdint>
#include <vector>

#include "gmm.hpp"
#include "guidance.hpp"
#include "operators.hpp"
#include "sampler.hpp"
#include "schedule.hpp"

namespace gdlab {

/*
 * Necessary conditions satisfied by any true posterior sampler under the
 * measurement model y = x0 + sigma_y * eta:
 *
 *   - E||x0 - sample||^2 equals twice the minimum mean squared error;
 *   - the residual y - sample is N(0, sigma_y^2) distributed and
 *     independent of the sample.
 *
 * mse is estimated from the first sample per condition, mmse from the mean
 * of the remaining samples, both averaged over conditions. Residuals are
 * pooled over all samples and coordinates for the std / KS / Pearson checks.
 */
struct PosteriorDiagnostics {
  double mse = 0.0;
  double mmse = 0.0;
  double mse_mmse_ratio = 0.0;
  double residual_std = 0.0;
  double ks_pvalue = 0.0;
  double pearson_r = 0.0;
  std::size_t n_conditions = 0;
  std::size_t n_samples_per_condition = 0;
};

PosteriorDiagnostics posterior_necessary_conditions(const GaussianMixture& gmm,
                                                    const NoiseSchedule& schedule,
                                                    const GuidanceSpec& guidance, double sigma_y,
                                                    std::size_t n_conditions,
                                                    std::size_t n_samples, std::uint64_t seed,
                                                    unsigned jobs = 1);

struct CurvePoint {
  std::size_t t = 0;
  double value = 0.0;
};

// One DPS-w trajectory; emits the recorded per-step weights.
std::vector<CurvePoint> wt_curve(const GaussianMixture& gmm, const Measurement& measurement,
                                 const NoiseSchedule& schedule, std::uint64_t seed);

// Runs one unconditional trajectory and evaluates the exact denoising-score
// decomposition against it for every sigma_y in the list; emits
// log10(||guidance_term|| / ||prior_term||) per step, one series per sigma_y.
std::vector<std::vector<CurvePoint>> term_ratio_curve(const GaussianMixture& gmm,
                                                      std::span<const double> y,
                                                      std::span<const double> sigma_y_list,
                                                      const NoiseSchedule& schedule,
                                                      std::uint64_t seed);

}  // namespace gdlab
