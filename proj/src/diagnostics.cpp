#include "diagnostics.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "rng.hpp"
#include "stats.hpp"
#include "vec.hpp"

namespace gdlab {

PosteriorDiagnostics posterior_necessary_conditions(const GaussianMixture& gmm,
                                                    const NoiseSchedule& schedule,
                                                    const GuidanceSpec& guidance, double sigma_y,
                                                    std::size_t n_conditions,
                                                    std::size_t n_samples, std::uint64_t seed,
                                                    unsigned jobs) {
  if (n_samples < 2)
    throw std::invalid_argument("posterior_necessary_conditions: need n_samples >= 2");
  if (n_conditions < 2)
    throw std::invalid_argument("posterior_necessary_conditions: need n_conditions >= 2");
  if (!(sigma_y > 0.0))
    throw std::invalid_argument("posterior_necessary_conditions: sigma_y must be > 0");

  const std::size_t d = gmm.dim();
  std::vector<double> mse_terms(n_conditions), mmse_terms(n_conditions);
  std::vector<std::vector<double>> residual_per_cond(n_conditions);
  std::vector<std::vector<double>> sample_per_cond(n_conditions);

  auto run_condition = [&](std::size_t c) {
    const std::uint64_t cond_seed = derive_seed(seed, c);
    const auto x0 = sample_prior(gmm, derive_seed(cond_seed, 0), 1)[0];
    const Measurement m =
        forward_model(x0, LinearOperator::identity(), sigma_y, derive_seed(cond_seed, 1));

    const auto finals =
        sample_batch(gmm, schedule, guidance, &m, derive_seed(cond_seed, 2), n_samples, 1);

    double se_first = 0.0;
    std::vector<double> mean_rest(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      const double dj = x0[j] - finals[0][j];
      se_first += dj * dj;
    }
    for (std::size_t s = 1; s < n_samples; ++s)
      for (std::size_t j = 0; j < d; ++j) mean_rest[j] += finals[s][j];
    double se_mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      mean_rest[j] /= static_cast<double>(n_samples - 1);
      const double dj = x0[j] - mean_rest[j];
      se_mean += dj * dj;
    }
    mse_terms[c] = se_first;
    mmse_terms[c] = se_mean;

    auto& res = residual_per_cond[c];
    auto& smp = sample_per_cond[c];
    res.reserve(n_samples * d);
    smp.reserve(n_samples * d);
    for (std::size_t s = 0; s < n_samples; ++s)
      for (std::size_t j = 0; j < d; ++j) {
        res.push_back(m.y[j] - finals[s][j]);
        smp.push_back(finals[s][j]);
      }
  };

  if (jobs <= 1) {
    for (std::size_t c = 0; c < n_conditions; ++c) run_condition(c);
  } else {
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t c = w; c < n_conditions; c += jobs) run_condition(c);
      });
    for (auto& t : workers) t.join();
  }

  std::vector<double> residuals, samples;
  residuals.reserve(n_conditions * n_samples * d);
  samples.reserve(n_conditions * n_samples * d);
  for (std::size_t c = 0; c < n_conditions; ++c) {
    residuals.insert(residuals.end(), residual_per_cond[c].begin(), residual_per_cond[c].end());
    samples.insert(samples.end(), sample_per_cond[c].begin(), sample_per_cond[c].end());
  }

  PosteriorDiagnostics out;
  out.n_conditions = n_conditions;
  out.n_samples_per_condition = n_samples;
  out.mse = mean(mse_terms);
  out.mmse = mean(mmse_terms);
  out.mse_mmse_ratio = out.mse / out.mmse;
  out.residual_std = std::sqrt(dot(residuals, residuals) / static_cast<double>(residuals.size()));
  const double dstat =
      ks_statistic(residuals, [sigma_y](double x) { return normal_cdf(x, 0.0, sigma_y); });
  out.ks_pvalue = ks_pvalue(dstat, residuals.size());
  out.pearson_r = pearson_r(residuals, samples);
  return out;
}

std::vector<CurvePoint> wt_curve(const GaussianMixture& gmm, const Measurement& measurement,
                                 const NoiseSchedule& schedule, std::uint64_t seed) {
  GuidanceSpec spec;
  spec.method = GuidanceMethod::DpsW;
  SamplerOptions opts;
  opts.record_steps = true;
  const Trajectory traj = sample_trajectory(gmm, schedule, spec, &measurement, seed, opts);
  std::vector<CurvePoint> curve;
  curve.reserve(traj.steps.size());
  for (const auto& s : traj.steps)
    if (s.w_t.has_value()) curve.push_back({s.t, *s.w_t});
  return curve;
}

std::vector<std::vector<CurvePoint>> term_ratio_curve(const GaussianMixture& gmm,
                                                      std::span<const double> y,
                                                      std::span<const double> sigma_y_list,
                                                      const NoiseSchedule& schedule,
                                                      std::uint64_t seed) {
  if (y.size() != gmm.dim()) throw std::invalid_argument("term_ratio_curve: y dimension mismatch");
  GuidanceSpec uncond;
  SamplerOptions opts;
  opts.record_steps = true;
  const Trajectory traj = sample_trajectory(gmm, schedule, uncond, nullptr, seed, opts);

  std::vector<std::vector<CurvePoint>> series(sigma_y_list.size());
  for (std::size_t i = 0; i < sigma_y_list.size(); ++i) {
    series[i].reserve(traj.steps.size());
    for (const auto& step : traj.steps) {
      if (step.t == 0) continue;  // sigma(0) = 0 has no perturbed score
      const double sigma_ve = schedule.sigma(step.t);
      std::vector<double> u = step.x;
      if (schedule.process() == Process::VP) {
        const double ab = schedule.alphabar(step.t);
        for (double& v : u) v /= std::sqrt(ab);
      }
      const GuidanceOutput g = exact_denoising_score(gmm, u, y, sigma_y_list[i], sigma_ve);
      const double ratio = norm2(g.guidance_term) / norm2(g.prior_term);
      series[i].push_back({step.t, std::log10(ratio)});
    }
  }
  return series;
}

}  // namespace gdlab
