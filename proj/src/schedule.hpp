#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gmm.hpp"

namespace gdlab {

enum class Process { VP, VE };

/*
 * Discrete noise schedule, t = 1..N.
 *
 * VP: beta_t in (0,1), alphabar_t = prod_{s<=t} (1 - beta_s), decreasing in t.
 * VE: sigma_t > 0, strictly increasing in t; sigma_N is the maximal level.
 *
 * The two parameterizations are exchangeable through
 * sigma_t^2 = (1 - alphabar_t) / alphabar_t.
 */
class NoiseSchedule {
public:
  static NoiseSchedule vp(std::vector<double> betas);
  static NoiseSchedule ve(std::vector<double> sigmas);

  Process process() const { return process_; }
  std::size_t steps() const { return n_; }

  // t in [1, N]; alphabar(0) == 1 by convention.
  double alphabar(std::size_t t) const;
  double beta(std::size_t t) const;
  // VE sigma at t in [1, N]; sigma(0) == 0 by convention.
  double sigma(std::size_t t) const;

  // Step whose VE sigma is closest to the requested level (parity with
  // discrete score models; the analytic oracle itself takes sigma directly).
  std::size_t nearest_step(double sigma_level) const;

private:
  NoiseSchedule() = default;
  Process process_ = Process::VP;
  std::size_t n_ = 0;
  std::vector<double> betas_;
  std::vector<double> alphabars_;
  std::vector<double> sigmas_;
};

// Linear beta ramp from beta_min to beta_max over n steps.
NoiseSchedule make_vp_linear(std::size_t n, double beta_min, double beta_max);

// Geometric sigma ladder from sigma_min to sigma_max over n steps.
NoiseSchedule make_ve_geometric(std::size_t n, double sigma_min, double sigma_max);

// sqrt((1 - alphabar_t) / alphabar_t) for a VP schedule.
double vp_to_ve_sigma(const NoiseSchedule& schedule, std::size_t t);

// Inverse of the conversion above: alphabar = 1 / (1 + sigma^2).
double alphabar_from_sigma(double sigma);

/*
 * Precision-weighted combination of a measurement y (noise sigma_y) and the
 * current iterate x_t (noise sigma_t):
 *
 *   sigma_tilde^2 = (sigma_y^-2 + sigma_t^-2)^-1
 *   x_tilde       = sigma_tilde^2 (sigma_y^-2 y + sigma_t^-2 x_t)
 *
 * guidance_var = sigma_y^2 + sigma_t^2 is the variance of the residual
 * factor N(y; x_t, guidance_var * I).
 */
struct TildeParams {
  double sigma_tilde_sq = 0.0;
  std::vector<double> x_tilde;
  double guidance_var = 0.0;
};

TildeParams tilde_params(std::span<const double> y, std::span<const double> x_t, double sigma_y,
                         double sigma_t);

// Diagonal effective covariance for inpainting: (sigma_y^-2 A + sigma_t^-2 I)^-1
// with A = diag(mask). Entries are (sigma_y^-2 + sigma_t^-2)^-1 where mask = 1
// and sigma_t^2 where mask = 0. sigma_y = 0 puts exact zeros on observed
// coordinates (the noiseless-pixel limit).
NoiseCov tilde_cov_inpaint(std::span<const int> mask, double sigma_y, double sigma_t);

}  // namespace gdlab
