#include "sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "errors.hpp"
#include "rng.hpp"
#include "vec.hpp"

namespace gdlab {

namespace {

void check_inputs(const GaussianMixture& gmm, const GuidanceSpec& guidance,
                  const Measurement* measurement) {
  if (guidance.method != GuidanceMethod::Unconditional) {
    if (measurement == nullptr)
      throw std::invalid_argument("guided sampling requires a measurement");
    if (measurement->y.size() != gmm.dim())
      throw std::invalid_argument("measurement dimension mismatch");
  }
  if (guidance.method == GuidanceMethod::Dps && !(guidance.zeta_prime >= 0.0))
    throw std::invalid_argument("dps zeta_prime must be >= 0");
}

void check_state(std::span<const double> x, std::size_t t) {
  if (!all_finite(x))
    throw NumericError("sampler produced a non-finite state at step t=" + std::to_string(t));
}

// Exact posterior score in VE coordinates, dispatched on the operator kind.
GuidanceOutput posterior_score_ve(const GaussianMixture& gmm, std::span<const double> u,
                                  const Measurement& m, double sigma_ve) {
  switch (m.op.kind()) {
    case OperatorKind::Identity:
      return exact_denoising_score(gmm, u, m.y, m.sigma_y, sigma_ve);
    case OperatorKind::Mask:
      return exact_inpainting_score(gmm, u, m.op.mask_values(), m.y, m.sigma_y, sigma_ve);
    case OperatorKind::Diagonal:
      return exact_invertible_score(gmm, u, m.op.diagonal_values(), m.y, m.sigma_y, sigma_ve);
  }
  throw std::invalid_argument("unknown operator kind");
}

struct StepInfo {
  std::optional<double> w_t;
  double guidance_norm = 0.0;
  double prior_norm = 0.0;
};

// DPS / DPS-w guidance step in VE coordinates; returns the vector to subtract
// from the state (already includes the step size). For DPS-w the recorded
// w_t is the residual-scaled equivalent w * ||y - A xhat0||, the per-step
// optimum in the same convention as DPS's zeta_prime; the applied weight is
// the raw projection w.
std::vector<double> dps_step_ve(const GaussianMixture& gmm, std::span<const double> u,
                                const GuidanceSpec& guidance, const Measurement& m,
                                double sigma_ve, StepInfo& info) {
  DpsParts parts = dps_residual_parts_ve(gmm, u, m, sigma_ve);
  double zeta = 0.0;
  if (guidance.method == GuidanceMethod::DpsW) {
    if (m.op.kind() == OperatorKind::Diagonal)
      throw std::invalid_argument("dps-w requires an identity or mask operator");
    const DpsWeight w = dps_w_weight(gmm, u, m, sigma_ve, guidance.enhanced);
    zeta = w.w;
    info.w_t = w.w * parts.residual_norm;
  } else {
    if (guidance.residual_scaled) {
      zeta = parts.residual_norm > 0.0 ? guidance.zeta_prime / parts.residual_norm : 0.0;
    } else {
      zeta = guidance.zeta_prime;
    }
    info.w_t = zeta;
  }
  for (double& v : parts.gradient) v *= zeta;
  info.guidance_norm = norm2(parts.gradient);
  return std::move(parts.gradient);
}

}  // namespace

Trajectory ancestral_sample(const GaussianMixture& gmm, const NoiseSchedule& schedule,
                            const GuidanceSpec& guidance, const Measurement* measurement,
                            std::uint64_t seed, const SamplerOptions& options) {
  if (schedule.process() != Process::VP)
    throw std::invalid_argument("ancestral_sample requires a VP schedule");
  check_inputs(gmm, guidance, measurement);

  const std::size_t d = gmm.dim();
  const std::size_t n = schedule.steps();
  Rng rng(seed);

  Trajectory traj;
  traj.seed = seed;
  if (options.record_steps) traj.steps.reserve(n);

  std::vector<double> x(d);
  for (double& v : x) v = rng.normal();

  for (std::size_t t = n; t >= 1; --t) {
    const double abar = schedule.alphabar(t);
    const double abar_prev = schedule.alphabar(t - 1);
    const double beta = schedule.beta(t);
    const double sigma_ve = std::sqrt((1.0 - abar) / abar);
    const double sqrt_abar = std::sqrt(abar);

    std::vector<double> u(d);
    for (std::size_t j = 0; j < d; ++j) u[j] = x[j] / sqrt_abar;

    StepInfo info;
    std::vector<double> score_ve;
    if (guidance.method == GuidanceMethod::ExactPosterior) {
      GuidanceOutput g = posterior_score_ve(gmm, u, *measurement, sigma_ve);
      info.prior_norm = norm2(g.prior_term);
      info.guidance_norm = norm2(g.guidance_term);
      score_ve = std::move(g.posterior_score);
    } else {
      score_ve = score_perturbed(gmm, u, NoiseCov::isotropic(sigma_ve * sigma_ve));
      info.prior_norm = norm2(score_ve);
    }

    // Tweedie in VE coordinates equals the VP form (1/sqrt(abar))(x + (1-abar) s_vp).
    std::vector<double> xhat(d);
    for (std::size_t j = 0; j < d; ++j) xhat[j] = u[j] + sigma_ve * sigma_ve * score_ve[j];

    const double c_x = std::sqrt(1.0 - beta) * (1.0 - abar_prev) / (1.0 - abar);
    const double c_hat = std::sqrt(abar_prev) * beta / (1.0 - abar);
    const double var = (1.0 - abar_prev) / (1.0 - abar) * beta;  // 0 at t = 1
    const double sd = std::sqrt(var);
    for (std::size_t j = 0; j < d; ++j)
      x[j] = c_x * x[j] + c_hat * xhat[j] + (t > 1 ? sd * rng.normal() : 0.0);

    if (guidance.method == GuidanceMethod::Dps || guidance.method == GuidanceMethod::DpsW) {
      const auto step = dps_step_ve(gmm, u, guidance, *measurement, sigma_ve, info);
      // VP-space gradient is the VE gradient scaled by 1/sqrt(abar). DPS
      // subtracts it raw; DPS-w treats w_t * s_ref as a likelihood-score
      // estimate and integrates it with the score's step coefficient
      // beta_t / sqrt(alpha_t), which keeps the late steps contractive where
      // w_t approaches 1 / (2 sigma_y^2).
      const double coeff = guidance.method == GuidanceMethod::DpsW
                               ? beta / std::sqrt(1.0 - beta)
                               : 1.0;
      for (std::size_t j = 0; j < d; ++j) x[j] -= coeff * step[j] / sqrt_abar;
      info.guidance_norm *= coeff;
    }

    check_state(x, t - 1);
    if (options.record_steps) traj.steps.push_back({t - 1, x, info.w_t, info.guidance_norm, info.prior_norm});
  }

  traj.final_x = std::move(x);
  return traj;
}

Trajectory ve_sample(const GaussianMixture& gmm, const NoiseSchedule& schedule,
                     const GuidanceSpec& guidance, const Measurement* measurement,
                     std::uint64_t seed, const SamplerOptions& options) {
  if (schedule.process() != Process::VE)
    throw std::invalid_argument("ve_sample requires a VE schedule");
  check_inputs(gmm, guidance, measurement);

  const std::size_t d = gmm.dim();
  const std::size_t n = schedule.steps();
  Rng rng(seed);

  Trajectory traj;
  traj.seed = seed;
  if (options.record_steps) traj.steps.reserve(n);

  std::vector<double> x(d);
  const double sigma_max = schedule.sigma(n);
  for (double& v : x) v = sigma_max * rng.normal();

  for (std::size_t t = n; t >= 1; --t) {
    const double s_t = schedule.sigma(t);
    const double s_prev = schedule.sigma(t - 1);
    const double dv = s_t * s_t - s_prev * s_prev;

    StepInfo info;
    std::vector<double> score;
    if (guidance.method == GuidanceMethod::ExactPosterior) {
      GuidanceOutput g = posterior_score_ve(gmm, x, *measurement, s_t);
      info.prior_norm = norm2(g.prior_term);
      info.guidance_norm = norm2(g.guidance_term);
      score = std::move(g.posterior_score);
    } else {
      score = score_perturbed(gmm, x, NoiseCov::isotropic(s_t * s_t));
      info.prior_norm = norm2(score);
    }

    std::vector<double> step;
    double step_coeff = 1.0;
    if (guidance.method == GuidanceMethod::Dps || guidance.method == GuidanceMethod::DpsW) {
      step = dps_step_ve(gmm, x, guidance, *measurement, s_t, info);
      // Same stabilization as the VP sampler: DPS-w guidance integrates with
      // the SDE step size dv instead of being subtracted raw.
      if (guidance.method == GuidanceMethod::DpsW) step_coeff = dv;
      info.guidance_norm *= step_coeff;
    }

    const double sd = std::sqrt(dv);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] += dv * score[j] + (t > 1 ? sd * rng.normal() : 0.0);
      if (!step.empty()) x[j] -= step_coeff * step[j];
    }

    check_state(x, t - 1);
    if (options.record_steps) traj.steps.push_back({t - 1, x, info.w_t, info.guidance_norm, info.prior_norm});
  }

  traj.final_x = std::move(x);
  return traj;
}

Trajectory sample_trajectory(const GaussianMixture& gmm, const NoiseSchedule& schedule,
                             const GuidanceSpec& guidance, const Measurement* measurement,
                             std::uint64_t seed, const SamplerOptions& options) {
  return schedule.process() == Process::VP
             ? ancestral_sample(gmm, schedule, guidance, measurement, seed, options)
             : ve_sample(gmm, schedule, guidance, measurement, seed, options);
}

std::vector<std::vector<double>> sample_batch(const GaussianMixture& gmm,
                                              const NoiseSchedule& schedule,
                                              const GuidanceSpec& guidance,
                                              const Measurement* measurement,
                                              std::uint64_t master_seed, std::size_t n,
                                              unsigned jobs) {
  std::vector<std::vector<double>> finals(n);
  auto run_range = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < n; i += stride) {
      finals[i] = sample_trajectory(gmm, schedule, guidance, measurement,
                                    derive_seed(master_seed, i), {})
                      .final_x;
    }
  };
  if (jobs <= 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) workers.emplace_back(run_range, w, jobs);
    for (auto& t : workers) t.join();
  }
  return finals;
}

}  // namespace gdlab
