#include "gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rng.hpp"

namespace gdlab {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_noise(const NoiseCov& noise, std::size_t dim) {
  if (!noise.is_isotropic() && noise.dim_or_zero() != dim)
    throw std::invalid_argument("noise covariance dimension mismatch");
}

void check_point(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim) throw std::invalid_argument("point dimension mismatch");
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite input point");
}

// Per-component log w_i + log N(x; mu_i, diag(v_i) + S).
std::vector<double> component_log_terms(const GaussianMixture& gmm, std::span<const double> x,
                                        const NoiseCov& noise) {
  const std::size_t d = gmm.dim();
  std::vector<double> lt(gmm.components().size());
  for (std::size_t i = 0; i < gmm.components().size(); ++i) {
    const auto& c = gmm.components()[i];
    double acc = std::log(c.weight);
    for (std::size_t j = 0; j < d; ++j) {
      const double s = c.var[j] + noise.entry(j);
      const double dj = x[j] - c.mean[j];
      acc += -0.5 * (kLog2Pi + std::log(s)) - 0.5 * dj * dj / s;
    }
    lt[i] = acc;
  }
  return lt;
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : v) s += std::exp(t - m);
  return m + std::log(s);
}

// Responsibilities exp(lt_i - lse), computed with the max subtracted.
std::vector<double> responsibilities(const std::vector<double>& lt) {
  const double m = *std::max_element(lt.begin(), lt.end());
  std::vector<double> g(lt.size());
  double s = 0.0;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    g[i] = std::exp(lt[i] - m);
    s += g[i];
  }
  for (double& v : g) v /= s;
  return g;
}

}  // namespace

NoiseCov NoiseCov::isotropic(double sigma_sq) {
  if (!(sigma_sq >= 0.0) || !std::isfinite(sigma_sq))
    throw std::invalid_argument("isotropic noise variance must be >= 0 and finite");
  NoiseCov n;
  n.isotropic_ = true;
  n.sigma_sq_ = sigma_sq;
  return n;
}

NoiseCov NoiseCov::diagonal(std::vector<double> entries) {
  if (entries.empty()) throw std::invalid_argument("diagonal noise needs at least one entry");
  for (double v : entries)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("diagonal noise entries must be >= 0 and finite");
  NoiseCov n;
  n.isotropic_ = false;
  n.diag_ = std::move(entries);
  return n;
}

GaussianMixture::GaussianMixture(std::size_t dim, std::vector<GmmComponent> components)
    : dim_(dim), components_(std::move(components)) {
  if (dim_ == 0) throw std::invalid_argument("gmm dim must be positive");
  if (components_.empty()) throw std::invalid_argument("gmm needs at least one component");
  double wsum = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("gmm weights must be positive");
    if (c.mean.size() != dim_ || c.var.size() != dim_)
      throw std::invalid_argument("gmm component mean/var length must equal dim");
    for (double v : c.var)
      if (!(v > 0.0)) throw std::invalid_argument("gmm variances must be strictly positive");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("gmm weights must sum to 1 within 1e-12");
}

GaussianMixture GaussianMixture::convolved(const NoiseCov& noise) const {
  check_noise(noise, dim_);
  std::vector<GmmComponent> comps = components_;
  for (auto& c : comps)
    for (std::size_t j = 0; j < dim_; ++j) c.var[j] += noise.entry(j);
  return GaussianMixture(dim_, std::move(comps));
}

std::vector<double> GaussianMixture::mean() const {
  std::vector<double> m(dim_, 0.0);
  for (const auto& c : components_)
    for (std::size_t j = 0; j < dim_; ++j) m[j] += c.weight * c.mean[j];
  return m;
}

std::vector<double> GaussianMixture::variance() const {
  const auto m = mean();
  std::vector<double> v(dim_, 0.0);
  for (const auto& c : components_)
    for (std::size_t j = 0; j < dim_; ++j) {
      const double d = c.mean[j] - m[j];
      v[j] += c.weight * (c.var[j] + d * d);
    }
  return v;
}

GaussianMixture GaussianMixture::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("dim")) throw std::invalid_argument("gmm json: missing field dim");
  if (!j.contains("components")) throw std::invalid_argument("gmm json: missing field components");
  const std::size_t dim = j.at("dim").get<std::size_t>();
  std::vector<GmmComponent> comps;
  for (const auto& cj : j.at("components")) {
    GmmComponent c;
    c.weight = cj.at("weight").get<double>();
    c.mean = cj.at("mean").get<std::vector<double>>();
    c.var = cj.at("var").get<std::vector<double>>();
    comps.push_back(std::move(c));
  }
  return GaussianMixture(dim, std::move(comps));
}

std::string GaussianMixture::to_json() const {
  nlohmann::json j;
  j["dim"] = dim_;
  j["components"] = nlohmann::json::array();
  for (const auto& c : components_)
    j["components"].push_back({{"weight", c.weight}, {"mean", c.mean}, {"var", c.var}});
  return j.dump();
}

double log_density_perturbed(const GaussianMixture& gmm, std::span<const double> x,
                             const NoiseCov& noise) {
  check_point(x, gmm.dim());
  check_noise(noise, gmm.dim());
  return log_sum_exp(component_log_terms(gmm, x, noise));
}

std::vector<double> score_perturbed(const GaussianMixture& gmm, std::span<const double> x,
                                    const NoiseCov& noise) {
  check_point(x, gmm.dim());
  check_noise(noise, gmm.dim());
  const std::size_t d = gmm.dim();
  const auto lt = component_log_terms(gmm, x, noise);
  const auto gamma = responsibilities(lt);
  std::vector<double> score(d, 0.0);
  for (std::size_t i = 0; i < gmm.components().size(); ++i) {
    const auto& c = gmm.components()[i];
    for (std::size_t j = 0; j < d; ++j)
      score[j] += gamma[i] * (c.mean[j] - x[j]) / (c.var[j] + noise.entry(j));
  }
  return score;
}

std::vector<double> hessian_perturbed(const GaussianMixture& gmm, std::span<const double> x,
                                      const NoiseCov& noise) {
  check_point(x, gmm.dim());
  check_noise(noise, gmm.dim());
  const std::size_t d = gmm.dim();
  const auto lt = component_log_terms(gmm, x, noise);
  const auto gamma = responsibilities(lt);

  // H = sum_i gamma_i (g_i g_i^T - Lambda_i) - s s^T, with g_i = Lambda_i (mu_i - x)
  // and s = sum_i gamma_i g_i.
  std::vector<double> h(d * d, 0.0);
  std::vector<double> s(d, 0.0);
  std::vector<double> gi(d);
  for (std::size_t i = 0; i < gmm.components().size(); ++i) {
    const auto& c = gmm.components()[i];
    for (std::size_t j = 0; j < d; ++j) gi[j] = (c.mean[j] - x[j]) / (c.var[j] + noise.entry(j));
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) h[j * d + k] += gamma[i] * gi[j] * gi[k];
      h[j * d + j] -= gamma[i] / (c.var[j] + noise.entry(j));
      s[j] += gamma[i] * gi[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) h[j * d + k] -= s[j] * s[k];
  return h;
}

std::vector<std::vector<double>> sample_prior(const GaussianMixture& gmm, std::uint64_t seed,
                                              std::size_t n) {
  if (n < 1) throw std::invalid_argument("sample_prior: n must be >= 1");
  Rng rng(seed);
  const std::size_t d = gmm.dim();
  std::vector<std::vector<double>> out(n, std::vector<double>(d));
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t idx = gmm.components().size() - 1;
    for (std::size_t i = 0; i < gmm.components().size(); ++i) {
      acc += gmm.components()[i].weight;
      if (u <= acc) {
        idx = i;
        break;
      }
    }
    const auto& c = gmm.components()[idx];
    for (std::size_t j = 0; j < d; ++j) out[k][j] = c.mean[j] + std::sqrt(c.var[j]) * rng.normal();
  }
  return out;
}

}  // namespace gdlab
