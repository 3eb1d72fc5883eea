#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gdlab {

// Additive Gaussian noise covariance used when querying a mixture that has
// been convolved with noise: either sigma^2 * I or a diagonal matrix. A zero
// diagonal entry marks a coordinate that receives no noise; the mixture
// component variance on that coordinate must be positive.
class NoiseCov {
public:
  static NoiseCov isotropic(double sigma_sq);
  static NoiseCov diagonal(std::vector<double> entries);

  bool is_isotropic() const { return isotropic_; }
  // Variance added on coordinate i.
  double entry(std::size_t i) const { return isotropic_ ? sigma_sq_ : diag_[i]; }
  // 0 for isotropic, the vector length otherwise.
  std::size_t dim_or_zero() const { return isotropic_ ? 0 : diag_.size(); }
  double isotropic_value() const { return sigma_sq_; }
  const std::vector<double>& diagonal_entries() const { return diag_; }

private:
  NoiseCov() = default;
  bool isotropic_ = true;
  double sigma_sq_ = 0.0;
  std::vector<double> diag_;
};

struct GmmComponent {
  double weight = 0.0;
  std::vector<double> mean;
  std::vector<double> var;  // diagonal covariance entries, all > 0
};

/*
 * Weighted mixture of diagonal-covariance Gaussians,
 *
 *   p(x) = sum_i w_i N(x; mu_i, diag(v_i)),
 *
 * with closed-form log-density, score and Hessian after convolution with
 * Gaussian noise: convolving with N(0, S) turns each component covariance
 * into diag(v_i) + S, so every perturbed quantity stays analytic. This is
 * the stand-in for a trained score model.
 */
class GaussianMixture {
public:
  GaussianMixture(std::size_t dim, std::vector<GmmComponent> components);

  std::size_t dim() const { return dim_; }
  const std::vector<GmmComponent>& components() const { return components_; }

  // Mixture with variances grown by `noise`; exact convolution.
  GaussianMixture convolved(const NoiseCov& noise) const;

  // E[x] and per-coordinate Var[x] of the mixture.
  std::vector<double> mean() const;
  std::vector<double> variance() const;

  static GaussianMixture from_json(const std::string& text);
  std::string to_json() const;

private:
  std::size_t dim_;
  std::vector<GmmComponent> components_;
};

// log sum_i w_i N(x; mu_i, diag(v_i) + S) with log-sum-exp stabilization.
double log_density_perturbed(const GaussianMixture& gmm, std::span<const double> x,
                             const NoiseCov& noise);

// Gradient of log_density_perturbed with respect to x.
std::vector<double> score_perturbed(const GaussianMixture& gmm, std::span<const double> x,
                                    const NoiseCov& noise);

// Hessian of log_density_perturbed, row-major dim*dim, symmetric.
std::vector<double> hessian_perturbed(const GaussianMixture& gmm, std::span<const double> x,
                                      const NoiseCov& noise);

// Ancestral draws: categorical component, then diagonal Gaussian.
std::vector<std::vector<double>> sample_prior(const GaussianMixture& gmm, std::uint64_t seed,
                                              std::size_t n);

}  // namespace gdlab
