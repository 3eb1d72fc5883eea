#include "guidance.hpp"

#include <cmath>
#include <stdexcept>

#include "schedule.hpp"
#include "vec.hpp"

namespace gdlab {

namespace {

void check_positive_noise(double sigma_y, double sigma_t) {
  if (!(sigma_y > 0.0)) throw std::invalid_argument("sigma_y must be positive");
  if (!(sigma_t > 0.0)) throw std::invalid_argument("sigma_t must be positive");
}

GuidanceOutput assemble(std::vector<double> prior, std::vector<double> guidance) {
  GuidanceOutput out;
  out.posterior_score = add(prior, guidance);
  out.prior_term = std::move(prior);
  out.guidance_term = std::move(guidance);
  return out;
}

// VE state and level for a VP state at alphabar.
struct VpView {
  std::vector<double> u;
  double sigma = 0.0;
  double scale = 0.0;  // 1 / sqrt(alphabar)
};

VpView vp_to_ve(std::span<const double> x_t, double alphabar) {
  if (!(alphabar > 0.0 && alphabar < 1.0))
    throw std::invalid_argument("alphabar must lie in (0,1)");
  VpView v;
  v.scale = 1.0 / std::sqrt(alphabar);
  v.sigma = std::sqrt((1.0 - alphabar) / alphabar);
  v.u = scale(v.scale, x_t);
  return v;
}

}  // namespace

GuidanceOutput exact_denoising_score(const GaussianMixture& gmm, std::span<const double> x_t,
                                     std::span<const double> y, double sigma_y, double sigma_t) {
  check_positive_noise(sigma_y, sigma_t);
  if (x_t.size() != gmm.dim() || y.size() != gmm.dim())
    throw std::invalid_argument("exact_denoising_score: dimension mismatch");

  const TildeParams tp = tilde_params(y, x_t, sigma_y, sigma_t);
  const auto s = score_perturbed(gmm, tp.x_tilde, NoiseCov::isotropic(tp.sigma_tilde_sq));
  const double c = tp.sigma_tilde_sq / (sigma_t * sigma_t);

  std::vector<double> prior(gmm.dim()), guidance(gmm.dim());
  for (std::size_t j = 0; j < gmm.dim(); ++j) {
    prior[j] = c * s[j];
    guidance[j] = -(x_t[j] - y[j]) / tp.guidance_var;
  }
  return assemble(std::move(prior), std::move(guidance));
}

GuidanceOutput exact_inpainting_score(const GaussianMixture& gmm, std::span<const double> x_t,
                                      std::span<const int> mask, std::span<const double> y,
                                      double sigma_y, double sigma_t) {
  if (!(sigma_y >= 0.0)) throw std::invalid_argument("exact_inpainting_score: sigma_y must be >= 0");
  if (!(sigma_t > 0.0)) throw std::invalid_argument("exact_inpainting_score: sigma_t must be > 0");
  const std::size_t d = gmm.dim();
  if (x_t.size() != d || y.size() != d || mask.size() != d)
    throw std::invalid_argument("exact_inpainting_score: dimension mismatch");

  const NoiseCov cov = tilde_cov_inpaint(mask, sigma_y, sigma_t);
  std::vector<double> x_tilde(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (mask[j] == 1) {
      // sigma_y = 0 collapses the observed coordinate onto the measurement.
      x_tilde[j] = sigma_y == 0.0
                       ? y[j]
                       : cov.entry(j) * (y[j] / (sigma_y * sigma_y) + x_t[j] / (sigma_t * sigma_t));
    } else {
      x_tilde[j] = x_t[j];  // Sigma_jj = sigma_t^2 cancels the precision weight
    }
  }
  const auto s = score_perturbed(gmm, x_tilde, cov);
  const double gvar = sigma_y * sigma_y + sigma_t * sigma_t;

  std::vector<double> prior(d), guidance(d);
  for (std::size_t j = 0; j < d; ++j) {
    prior[j] = cov.entry(j) / (sigma_t * sigma_t) * s[j];
    guidance[j] = mask[j] == 1 ? -(x_t[j] - y[j]) / gvar : 0.0;
  }
  return assemble(std::move(prior), std::move(guidance));
}

GuidanceOutput exact_invertible_score(const GaussianMixture& gmm, std::span<const double> x_t,
                                      std::span<const double> d, std::span<const double> y,
                                      double sigma_y, double sigma_t) {
  check_positive_noise(sigma_y, sigma_t);
  const std::size_t n = gmm.dim();
  if (x_t.size() != n || y.size() != n || d.size() != n)
    throw std::invalid_argument("exact_invertible_score: dimension mismatch");
  for (double v : d)
    if (v == 0.0) throw std::invalid_argument("exact_invertible_score: zero diagonal entry");

  const double wt = 1.0 / (sigma_t * sigma_t);
  const double wy = 1.0 / (sigma_y * sigma_y);
  std::vector<double> cov(n), mu(n);
  for (std::size_t j = 0; j < n; ++j) {
    cov[j] = 1.0 / (wy * d[j] * d[j] + wt);  // Sigma = (sy^-2 A^T A + st^-2 I)^-1
    mu[j] = cov[j] * (wy * d[j] * y[j] + wt * x_t[j]);
  }
  const auto s = score_perturbed(gmm, mu, NoiseCov::diagonal(cov));

  std::vector<double> prior(n), guidance(n);
  for (std::size_t j = 0; j < n; ++j) {
    prior[j] = cov[j] * wt * s[j];
    guidance[j] = -(x_t[j] - y[j] / d[j]) / (sigma_y * sigma_y / (d[j] * d[j]) + sigma_t * sigma_t);
  }
  return assemble(std::move(prior), std::move(guidance));
}

std::vector<double> tweedie_mean_ve(const GaussianMixture& gmm, std::span<const double> x_t,
                                    double sigma_t) {
  if (!(sigma_t >= 0.0)) throw std::invalid_argument("tweedie_mean_ve: sigma_t must be >= 0");
  const auto s = score_perturbed(gmm, x_t, NoiseCov::isotropic(sigma_t * sigma_t));
  std::vector<double> xhat(x_t.size());
  for (std::size_t j = 0; j < x_t.size(); ++j) xhat[j] = x_t[j] + sigma_t * sigma_t * s[j];
  return xhat;
}

std::vector<double> tweedie_mean_vp(const GaussianMixture& gmm, std::span<const double> x_t,
                                    double alphabar) {
  const VpView v = vp_to_ve(x_t, alphabar);
  return tweedie_mean_ve(gmm, v.u, v.sigma);
}

DpsParts dps_residual_parts_ve(const GaussianMixture& gmm, std::span<const double> x_t,
                               const Measurement& measurement, double sigma_t) {
  const std::size_t d = gmm.dim();
  if (x_t.size() != d || measurement.y.size() != d)
    throw std::invalid_argument("dps_residual_parts_ve: dimension mismatch");
  const double st2 = sigma_t * sigma_t;
  const auto noise = NoiseCov::isotropic(st2);
  const auto s = score_perturbed(gmm, x_t, noise);
  const auto h = hessian_perturbed(gmm, x_t, noise);

  std::vector<double> xhat(d);
  for (std::size_t j = 0; j < d; ++j) xhat[j] = x_t[j] + st2 * s[j];
  const auto ax = measurement.op.apply(xhat);
  std::vector<double> v(d);  // A^T (y - A xhat0)
  double rnorm = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    v[j] = measurement.y[j] - ax[j];
    rnorm += v[j] * v[j];
  }
  v = measurement.op.apply_transpose(v);

  DpsParts out;
  out.residual_norm = std::sqrt(rnorm);
  // grad = -2 (I + st^2 H)^T v; H symmetric.
  out.gradient.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    double hv = 0.0;
    for (std::size_t k = 0; k < d; ++k) hv += h[j * d + k] * v[k];
    out.gradient[j] = -2.0 * (v[j] + st2 * hv);
  }
  return out;
}

std::vector<double> dps_residual_gradient_ve(const GaussianMixture& gmm,
                                             std::span<const double> x_t,
                                             const Measurement& measurement, double sigma_t) {
  return dps_residual_parts_ve(gmm, x_t, measurement, sigma_t).gradient;
}

std::vector<double> dps_score_ve(const GaussianMixture& gmm, std::span<const double> x_t,
                                 const Measurement& measurement, double sigma_t, double zeta_t) {
  auto g = dps_residual_gradient_ve(gmm, x_t, measurement, sigma_t);
  for (double& v : g) v *= -zeta_t;
  return g;
}

std::vector<double> exact_noisy_likelihood_score(const GaussianMixture& gmm,
                                                 std::span<const double> x_t,
                                                 std::span<const double> y, double sigma_y,
                                                 double sigma_t) {
  check_positive_noise(sigma_y, sigma_t);
  const TildeParams tp = tilde_params(y, x_t, sigma_y, sigma_t);
  const auto s_tilde = score_perturbed(gmm, tp.x_tilde, NoiseCov::isotropic(tp.sigma_tilde_sq));
  const auto s_t = score_perturbed(gmm, x_t, NoiseCov::isotropic(sigma_t * sigma_t));
  const double c = tp.sigma_tilde_sq / (sigma_t * sigma_t);
  std::vector<double> out(x_t.size());
  for (std::size_t j = 0; j < x_t.size(); ++j)
    out[j] = c * s_tilde[j] - s_t[j] - (x_t[j] - y[j]) / tp.guidance_var;
  return out;
}

DpsWeight dps_w_weight(const GaussianMixture& gmm, std::span<const double> x_t,
                       const Measurement& reference, double sigma_t, bool enhanced) {
  const OperatorKind kind = reference.op.kind();
  if (kind == OperatorKind::Diagonal)
    throw std::invalid_argument("dps_w_weight: reference operator must be identity or mask");
  if (enhanced && kind != OperatorKind::Mask)
    throw std::invalid_argument("dps_w_weight: enhanced weights require a mask reference");

  auto s_exact =
      exact_noisy_likelihood_score(gmm, x_t, reference.y, reference.sigma_y, sigma_t);
  auto s_ref = dps_score_ve(gmm, x_t, reference, sigma_t, 1.0);

  if (kind == OperatorKind::Mask) {
    const auto& m = reference.op.mask_values();
    for (std::size_t j = 0; j < s_ref.size(); ++j) {
      if (m[j] == 0) {
        s_exact[j] = 0.0;
        s_ref[j] = 0.0;
      }
    }
  }

  const double denom = dot(s_ref, s_ref);
  DpsWeight w;
  if (denom == 0.0) {
    w.degenerate = true;
    return w;
  }
  w.w = dot(s_exact, s_ref) / denom;
  if (enhanced) {
    const auto& m = reference.op.mask_values();
    std::size_t observed = 0;
    for (int v : m) observed += static_cast<std::size_t>(v);
    if (observed == 0) throw std::invalid_argument("dps_w_weight: enhanced with empty mask");
    w.w *= std::sqrt(static_cast<double>(m.size()) / static_cast<double>(observed));
  }
  return w;
}

std::vector<double> prior_score_vp(const GaussianMixture& gmm, std::span<const double> x_t,
                                   double alphabar) {
  const VpView v = vp_to_ve(x_t, alphabar);
  auto s = score_perturbed(gmm, v.u, NoiseCov::isotropic(v.sigma * v.sigma));
  for (double& t : s) t *= v.scale;
  return s;
}

GuidanceOutput exact_denoising_score_vp(const GaussianMixture& gmm, std::span<const double> x_t,
                                        std::span<const double> y, double sigma_y,
                                        double alphabar) {
  const VpView v = vp_to_ve(x_t, alphabar);
  GuidanceOutput out = exact_denoising_score(gmm, v.u, y, sigma_y, v.sigma);
  out.prior_term = scale(v.scale, out.prior_term);
  out.guidance_term = scale(v.scale, out.guidance_term);
  out.posterior_score = scale(v.scale, out.posterior_score);
  return out;
}

GuidanceOutput exact_inpainting_score_vp(const GaussianMixture& gmm, std::span<const double> x_t,
                                         std::span<const int> mask, std::span<const double> y,
                                         double sigma_y, double alphabar) {
  const VpView v = vp_to_ve(x_t, alphabar);
  GuidanceOutput out = exact_inpainting_score(gmm, v.u, mask, y, sigma_y, v.sigma);
  out.prior_term = scale(v.scale, out.prior_term);
  out.guidance_term = scale(v.scale, out.guidance_term);
  out.posterior_score = scale(v.scale, out.posterior_score);
  return out;
}

std::vector<double> dps_residual_gradient_vp(const GaussianMixture& gmm,
                                             std::span<const double> x_t,
                                             const Measurement& measurement, double alphabar) {
  const VpView v = vp_to_ve(x_t, alphabar);
  auto g = dps_residual_gradient_ve(gmm, v.u, measurement, v.sigma);
  for (double& t : g) t *= v.scale;
  return g;
}

}  // namespace gdlab
