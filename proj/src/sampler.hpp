#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gmm.hpp"
#include "guidance.hpp"
#include "operators.hpp"
#include "schedule.hpp"

namespace gdlab {

struct TrajectoryStep {
  std::size_t t = 0;  // index of the state after the update, N-1 down to 0
  std::vector<double> x;
  // Guidance step size in DPS's residual-scaled convention: for DPS-w the
  // per-step optimum w * ||y - A xhat0|| (directly comparable to zeta_prime),
  // for DPS the applied zeta_t. Absent for other methods.
  std::optional<double> w_t;
  double guidance_norm = 0.0;
  double prior_norm = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::vector<double> final_x;
  std::uint64_t seed = 0;
};

struct SamplerOptions {
  bool record_steps = false;
};

/*
 * DDPM ancestral sampler with pluggable guidance, VP schedule.
 *
 * Starts at x_N ~ N(0, I). Each step forms xhat0 by Tweedie's formula, takes
 * the DDPM posterior-mean update with variance
 * beta_tilde = (1 - alphabar_{t-1}) / (1 - alphabar_t) * beta_t, then applies
 * the guidance rule: DPS subtracts zeta_t * grad ||y - A xhat0||^2 raw;
 * DPS-w subtracts the w_t-weighted gradient scaled by the score step
 * coefficient beta_t / sqrt(alpha_t) (w_t approaches 1 / (2 sigma_y^2) late
 * in the schedule, so the raw subtraction would be expansive there);
 * ExactPosterior swaps the exact posterior score into the xhat0 computation;
 * Unconditional adds nothing. No noise is injected on the final step.
 */
Trajectory ancestral_sample(const GaussianMixture& gmm, const NoiseSchedule& schedule,
                            const GuidanceSpec& guidance, const Measurement* measurement,
                            std::uint64_t seed, const SamplerOptions& options = {});

/*
 * Euler-Maruyama reverse-SDE sampler, VE schedule: starts at N(0, sigma_N^2 I);
 * x_{t-1} = x_t + (sigma_t^2 - sigma_{t-1}^2) * s + sqrt(sigma_t^2 - sigma_{t-1}^2) * z.
 * Same guidance plumbing as ancestral_sample.
 */
Trajectory ve_sample(const GaussianMixture& gmm, const NoiseSchedule& schedule,
                     const GuidanceSpec& guidance, const Measurement* measurement,
                     std::uint64_t seed, const SamplerOptions& options = {});

// Runs either sampler depending on schedule.process().
Trajectory sample_trajectory(const GaussianMixture& gmm, const NoiseSchedule& schedule,
                             const GuidanceSpec& guidance, const Measurement* measurement,
                             std::uint64_t seed, const SamplerOptions& options = {});

// Batch of final states with per-trajectory seeds derived from
// (master_seed, index); `jobs` > 1 runs trajectories concurrently with
// identical results.
std::vector<std::vector<double>> sample_batch(const GaussianMixture& gmm,
                                              const NoiseSchedule& schedule,
                                              const GuidanceSpec& guidance,
                                              const Measurement* measurement,
                                              std::uint64_t master_seed, std::size_t n,
                                              unsigned jobs = 1);

}  // namespace gdlab
