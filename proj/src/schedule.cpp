#include "schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace gdlab {

NoiseSchedule NoiseSchedule::vp(std::vector<double> betas) {
  if (betas.size() < 2) throw std::invalid_argument("vp schedule needs at least 2 steps");
  NoiseSchedule s;
  s.process_ = Process::VP;
  s.n_ = betas.size();
  s.alphabars_.resize(betas.size());
  double prod = 1.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0.0 && betas[i] < 1.0))
      throw std::invalid_argument("vp schedule: beta_t must lie in (0,1)");
    prod *= 1.0 - betas[i];
    s.alphabars_[i] = prod;
  }
  s.betas_ = std::move(betas);
  return s;
}

NoiseSchedule NoiseSchedule::ve(std::vector<double> sigmas) {
  if (sigmas.size() < 2) throw std::invalid_argument("ve schedule needs at least 2 steps");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 0.0)) throw std::invalid_argument("ve schedule: sigma_t must be positive");
    if (i > 0 && !(sigmas[i] > sigmas[i - 1]))
      throw std::invalid_argument("ve schedule: sigma_t must be strictly increasing");
  }
  NoiseSchedule s;
  s.process_ = Process::VE;
  s.n_ = sigmas.size();
  s.sigmas_ = std::move(sigmas);
  return s;
}

double NoiseSchedule::alphabar(std::size_t t) const {
  if (t == 0) return 1.0;
  if (t > n_) throw std::invalid_argument("schedule step out of range");
  if (process_ == Process::VP) return alphabars_[t - 1];
  return alphabar_from_sigma(sigmas_[t - 1]);
}

double NoiseSchedule::beta(std::size_t t) const {
  if (process_ != Process::VP) throw std::invalid_argument("beta undefined for VE schedule");
  if (t < 1 || t > n_) throw std::invalid_argument("schedule step out of range");
  return betas_[t - 1];
}

double NoiseSchedule::sigma(std::size_t t) const {
  if (t == 0) return 0.0;
  if (t > n_) throw std::invalid_argument("schedule step out of range");
  if (process_ == Process::VE) return sigmas_[t - 1];
  return vp_to_ve_sigma(*this, t);
}

std::size_t NoiseSchedule::nearest_step(double sigma_level) const {
  std::size_t best = 1;
  double best_gap = std::abs(sigma(1) - sigma_level);
  for (std::size_t t = 2; t <= n_; ++t) {
    const double gap = std::abs(sigma(t) - sigma_level);
    if (gap < best_gap) {
      best_gap = gap;
      best = t;
    }
  }
  return best;
}

NoiseSchedule make_vp_linear(std::size_t n, double beta_min, double beta_max) {
  if (n < 2) throw std::invalid_argument("make_vp_linear: need n >= 2");
  if (!(beta_min > 0.0 && beta_min < beta_max && beta_max < 1.0))
    throw std::invalid_argument("make_vp_linear: need 0 < beta_min < beta_max < 1");
  std::vector<double> betas(n);
  for (std::size_t i = 0; i < n; ++i)
    betas[i] = beta_min + (beta_max - beta_min) * static_cast<double>(i) / static_cast<double>(n - 1);
  return NoiseSchedule::vp(std::move(betas));
}

NoiseSchedule make_ve_geometric(std::size_t n, double sigma_min, double sigma_max) {
  if (n < 2) throw std::invalid_argument("make_ve_geometric: need n >= 2");
  if (!(sigma_min > 0.0 && sigma_min < sigma_max))
    throw std::invalid_argument("make_ve_geometric: need 0 < sigma_min < sigma_max");
  std::vector<double> sigmas(n);
  const double ratio = sigma_max / sigma_min;
  for (std::size_t i = 0; i < n; ++i)
    sigmas[i] = sigma_min * std::pow(ratio, static_cast<double>(i) / static_cast<double>(n - 1));
  return NoiseSchedule::ve(std::move(sigmas));
}

double vp_to_ve_sigma(const NoiseSchedule& schedule, std::size_t t) {
  if (t < 1 || t > schedule.steps()) throw std::invalid_argument("schedule step out of range");
  const double ab = schedule.alphabar(t);
  return std::sqrt((1.0 - ab) / ab);
}

double alphabar_from_sigma(double sigma) { return 1.0 / (1.0 + sigma * sigma); }

TildeParams tilde_params(std::span<const double> y, std::span<const double> x_t, double sigma_y,
                         double sigma_t) {
  if (y.size() != x_t.size()) throw std::invalid_argument("tilde_params: y and x_t length mismatch");
  if (!(sigma_y > 0.0) || !(sigma_t > 0.0))
    throw std::invalid_argument("tilde_params: noise levels must be positive");
  TildeParams p;
  const double wy = 1.0 / (sigma_y * sigma_y);
  const double wt = 1.0 / (sigma_t * sigma_t);
  p.sigma_tilde_sq = 1.0 / (wy + wt);
  p.guidance_var = sigma_y * sigma_y + sigma_t * sigma_t;
  p.x_tilde.resize(y.size());
  for (std::size_t j = 0; j < y.size(); ++j)
    p.x_tilde[j] = p.sigma_tilde_sq * (wy * y[j] + wt * x_t[j]);
  return p;
}

NoiseCov tilde_cov_inpaint(std::span<const int> mask, double sigma_y, double sigma_t) {
  if (!(sigma_y >= 0.0)) throw std::invalid_argument("tilde_cov_inpaint: sigma_y must be >= 0");
  if (!(sigma_t > 0.0)) throw std::invalid_argument("tilde_cov_inpaint: sigma_t must be > 0");
  std::vector<double> entries(mask.size());
  const double wt = 1.0 / (sigma_t * sigma_t);
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (mask[j] != 0 && mask[j] != 1)
      throw std::invalid_argument("tilde_cov_inpaint: mask entries must be 0 or 1");
    if (mask[j] == 1)
      entries[j] = sigma_y == 0.0 ? 0.0 : 1.0 / (1.0 / (sigma_y * sigma_y) + wt);
    else
      entries[j] = sigma_t * sigma_t;
  }
  return NoiseCov::diagonal(std::move(entries));
}

}  // namespace gdlab
