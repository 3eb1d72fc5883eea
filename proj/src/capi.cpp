#include "gdlab/gdlab.h"

#include <cstring>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "gmm.hpp"
#include "guidance.hpp"
#include "presets.hpp"
#include "runner.hpp"
#include "schedule.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

gdlab_status to_status(const std::exception& e) {
  set_error(e.what());
  if (dynamic_cast<const gdlab::ConfigError*>(&e)) return GDLAB_ERROR_CONFIG;
  if (dynamic_cast<const gdlab::NumericError*>(&e)) return GDLAB_ERROR_NUMERIC;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return GDLAB_ERROR_INVALID_ARGUMENT;
  return GDLAB_ERROR_NUMERIC;
}

template <typename Fn>
gdlab_status guarded(Fn&& fn) {
  try {
    fn();
    return GDLAB_OK;
  } catch (const std::exception& e) {
    return to_status(e);
  } catch (...) {
    set_error("unknown error");
    return GDLAB_ERROR_NUMERIC;
  }
}

gdlab_status require(bool cond, const char* msg) {
  if (cond) return GDLAB_OK;
  set_error(msg);
  return GDLAB_ERROR_INVALID_ARGUMENT;
}

gdlab::NoiseCov make_noise(gdlab_noise_kind kind, const double* noise, size_t dim) {
  if (kind == GDLAB_NOISE_ISOTROPIC) return gdlab::NoiseCov::isotropic(noise[0]);
  return gdlab::NoiseCov::diagonal(std::vector<double>(noise, noise + dim));
}

}  // namespace

struct gdlab_gmm {
  gdlab::GaussianMixture value;
};

struct gdlab_schedule {
  gdlab::NoiseSchedule value;
};

extern "C" {

const char* gdlab_version(void) { return "0.1.0"; }

const char* gdlab_last_error(void) { return g_last_error.c_str(); }

gdlab_status gdlab_gmm_from_json(const char* json_text, gdlab_gmm** out) {
  if (auto s = require(json_text && out, "gdlab_gmm_from_json: null argument")) return s;
  return guarded([&] { *out = new gdlab_gmm{gdlab::GaussianMixture::from_json(json_text)}; });
}

gdlab_status gdlab_gmm_from_preset(const char* name, gdlab_gmm** out) {
  if (auto s = require(name && out, "gdlab_gmm_from_preset: null argument")) return s;
  return guarded([&] { *out = new gdlab_gmm{gdlab::preset_gmm(name)}; });
}

void gdlab_gmm_free(gdlab_gmm* gmm) { delete gmm; }

size_t gdlab_gmm_dim(const gdlab_gmm* gmm) { return gmm ? gmm->value.dim() : 0; }

gdlab_status gdlab_gmm_eval(const gdlab_gmm* gmm, const double* x, size_t dim,
                            gdlab_noise_kind kind, const double* noise, double* log_density,
                            double* score, double* hessian) {
  if (auto s = require(gmm && x && noise, "gdlab_gmm_eval: null argument")) return s;
  if (auto s = require(dim == gmm->value.dim(), "gdlab_gmm_eval: dimension mismatch")) return s;
  return guarded([&] {
    const auto cov = make_noise(kind, noise, dim);
    const std::span<const double> xs(x, dim);
    if (log_density) *log_density = gdlab::log_density_perturbed(gmm->value, xs, cov);
    if (score) {
      const auto v = gdlab::score_perturbed(gmm->value, xs, cov);
      std::memcpy(score, v.data(), dim * sizeof(double));
    }
    if (hessian) {
      const auto h = gdlab::hessian_perturbed(gmm->value, xs, cov);
      std::memcpy(hessian, h.data(), dim * dim * sizeof(double));
    }
  });
}

gdlab_status gdlab_gmm_sample(const gdlab_gmm* gmm, uint64_t seed, size_t n, double* out) {
  if (auto s = require(gmm && out && n >= 1, "gdlab_gmm_sample: null argument or n < 1")) return s;
  return guarded([&] {
    const auto draws = gdlab::sample_prior(gmm->value, seed, n);
    for (size_t i = 0; i < n; ++i)
      std::memcpy(out + i * gmm->value.dim(), draws[i].data(),
                  gmm->value.dim() * sizeof(double));
  });
}

gdlab_status gdlab_schedule_vp_linear(size_t steps, double beta_min, double beta_max,
                                      gdlab_schedule** out) {
  if (auto s = require(out != nullptr, "gdlab_schedule_vp_linear: null output")) return s;
  return guarded(
      [&] { *out = new gdlab_schedule{gdlab::make_vp_linear(steps, beta_min, beta_max)}; });
}

gdlab_status gdlab_schedule_ve_geometric(size_t steps, double sigma_min, double sigma_max,
                                         gdlab_schedule** out) {
  if (auto s = require(out != nullptr, "gdlab_schedule_ve_geometric: null output")) return s;
  return guarded(
      [&] { *out = new gdlab_schedule{gdlab::make_ve_geometric(steps, sigma_min, sigma_max)}; });
}

void gdlab_schedule_free(gdlab_schedule* schedule) { delete schedule; }

size_t gdlab_schedule_steps(const gdlab_schedule* schedule) {
  return schedule ? schedule->value.steps() : 0;
}

gdlab_status gdlab_schedule_sigma(const gdlab_schedule* schedule, size_t t, double* out) {
  if (auto s = require(schedule && out, "gdlab_schedule_sigma: null argument")) return s;
  return guarded([&] {
    if (t < 1 || t > schedule->value.steps())
      throw std::invalid_argument("gdlab_schedule_sigma: step out of range");
    *out = schedule->value.sigma(t);
  });
}

gdlab_status gdlab_denoising_score(const gdlab_gmm* gmm, const double* x_t, const double* y,
                                   size_t dim, double sigma_y, double sigma_t, double* posterior,
                                   double* prior_term, double* guidance_term) {
  if (auto s = require(gmm && x_t && y && posterior, "gdlab_denoising_score: null argument"))
    return s;
  if (auto s = require(dim == gmm->value.dim(), "gdlab_denoising_score: dimension mismatch"))
    return s;
  return guarded([&] {
    const auto g = gdlab::exact_denoising_score(gmm->value, {x_t, dim}, {y, dim}, sigma_y, sigma_t);
    std::memcpy(posterior, g.posterior_score.data(), dim * sizeof(double));
    if (prior_term) std::memcpy(prior_term, g.prior_term.data(), dim * sizeof(double));
    if (guidance_term) std::memcpy(guidance_term, g.guidance_term.data(), dim * sizeof(double));
  });
}

gdlab_status gdlab_inpainting_score(const gdlab_gmm* gmm, const double* x_t, const int32_t* mask,
                                    const double* y, size_t dim, double sigma_y, double sigma_t,
                                    double* posterior, double* prior_term,
                                    double* guidance_term) {
  if (auto s = require(gmm && x_t && mask && y && posterior,
                       "gdlab_inpainting_score: null argument"))
    return s;
  if (auto s = require(dim == gmm->value.dim(), "gdlab_inpainting_score: dimension mismatch"))
    return s;
  return guarded([&] {
    const std::vector<int> m(mask, mask + dim);
    const auto g =
        gdlab::exact_inpainting_score(gmm->value, {x_t, dim}, m, {y, dim}, sigma_y, sigma_t);
    std::memcpy(posterior, g.posterior_score.data(), dim * sizeof(double));
    if (prior_term) std::memcpy(prior_term, g.prior_term.data(), dim * sizeof(double));
    if (guidance_term) std::memcpy(guidance_term, g.guidance_term.data(), dim * sizeof(double));
  });
}

gdlab_status gdlab_tweedie_mean(const gdlab_gmm* gmm, const double* x_t, size_t dim,
                                double sigma_t, double* out) {
  if (auto s = require(gmm && x_t && out, "gdlab_tweedie_mean: null argument")) return s;
  if (auto s = require(dim == gmm->value.dim(), "gdlab_tweedie_mean: dimension mismatch"))
    return s;
  return guarded([&] {
    const auto v = gdlab::tweedie_mean_ve(gmm->value, {x_t, dim}, sigma_t);
    std::memcpy(out, v.data(), dim * sizeof(double));
  });
}

gdlab_status gdlab_dps_w_weight(const gdlab_gmm* gmm, const double* x_t, const double* y,
                                size_t dim, const int32_t* mask, double sigma_y, double sigma_t,
                                int enhanced, double* w, int* degenerate) {
  if (auto s = require(gmm && x_t && y && w, "gdlab_dps_w_weight: null argument")) return s;
  if (auto s = require(dim == gmm->value.dim(), "gdlab_dps_w_weight: dimension mismatch"))
    return s;
  return guarded([&] {
    gdlab::Measurement m;
    m.y.assign(y, y + dim);
    m.sigma_y = sigma_y;
    m.op = mask ? gdlab::LinearOperator::mask(std::vector<int>(mask, mask + dim))
                : gdlab::LinearOperator::identity();
    const auto r = gdlab::dps_w_weight(gmm->value, {x_t, dim}, m, sigma_t, enhanced != 0);
    *w = r.w;
    if (degenerate) *degenerate = r.degenerate ? 1 : 0;
  });
}

gdlab_status gdlab_validate_config(const char* config_json) {
  if (auto s = require(config_json != nullptr, "gdlab_validate_config: null argument")) return s;
  return guarded([&] { gdlab::parse_config_text(config_json); });
}

gdlab_status gdlab_run_config(const char* config_json, char* summary, size_t summary_len) {
  if (auto s = require(config_json != nullptr, "gdlab_run_config: null argument")) return s;
  return guarded([&] {
    const auto config = gdlab::parse_config_text(config_json);
    const auto result = gdlab::run_experiment(config);
    if (summary && summary_len > 0) {
      std::strncpy(summary, result.summary.c_str(), summary_len - 1);
      summary[summary_len - 1] = '\0';
    }
  });
}

}  // extern "C"
