#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "guidance.hpp"
#include "oracles.hpp"
#include "sampler.hpp"
#include "stats.hpp"
#include "test_util.hpp"
#include "vec.hpp"

using namespace gdlab;
using test::QuadratureOracle2D;

namespace {

// Shared 1200^2 oracle for the double well; built once.
const QuadratureOracle2D& dw_quad() {
  static const QuadratureOracle2D q(test::double_well(), -8.0, 8.0, 1200);
  return q;
}

GaussianMixture iso_gauss(std::size_t dim, double mu, double var) {
  std::vector<double> m(dim, mu), v(dim, var);
  return GaussianMixture(dim, {{1.0, m, v}});
}

// Conjugate closed form for a single isotropic gaussian prior N(mu0, s0^2 I):
// the perturbed posterior is N(m, (s^2 + sigma_t^2) I) with
// s^2 = (s0^-2 + sy^-2)^-1 and m = s^2 (mu0 / s0^2 + y / sy^2).
std::vector<double> conjugate_denoising_score(double mu0, double var0,
                                              std::span<const double> x_t,
                                              std::span<const double> y, double sy, double st) {
  const double s2 = 1.0 / (1.0 / var0 + 1.0 / (sy * sy));
  std::vector<double> out(x_t.size());
  for (std::size_t j = 0; j < x_t.size(); ++j) {
    const double m = s2 * (mu0 / var0 + y[j] / (sy * sy));
    out[j] = -(x_t[j] - m) / (s2 + st * st);
  }
  return out;
}

}  // namespace

TEST_SUITE("guidance") {

TEST_CASE("denoising score reduces to the unconditional score as sigma_y grows") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.7, -0.3}, y{1.0, 1.0};
  const auto g = exact_denoising_score(dw, x, y, 1e9, 0.8);
  const auto uncond = score_perturbed(dw, x, NoiseCov::isotropic(0.64));
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(std::abs(g.posterior_score[j] - uncond[j]) <= 1e-6 * std::abs(uncond[j]));
}

TEST_CASE("denoising score matches the conjugate closed form") {
  const auto prior = iso_gauss(3, 0.4, 0.81);
  const std::vector<double> x{1.0, -2.0, 0.1}, y{0.5, 0.5, -1.0};
  const auto g = exact_denoising_score(prior, x, y, 0.3, 0.7);
  const auto oracle = conjugate_denoising_score(0.4, 0.81, x, y, 0.3, 0.7);
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(g.posterior_score[j] - oracle[j]) < 1e-10);
}

TEST_CASE("denoising score matches the quadrature gradient on the double well") {
  const auto dw = test::double_well();
  const std::vector<double> y{0.0, 0.0};
  const double sy = 0.2, st = 0.5;
  const std::vector<double> x{0.5, -0.5};
  const auto g = exact_denoising_score(dw, x, y, sy, st);
  const auto fd = test::fd_gradient(
      [&](std::span<const double> p) { return dw_quad().log_joint_denoise(p, y, sy, st); }, x,
      1e-5);
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(g.posterior_score[j] - fd[j]) < 1e-5);
}

TEST_CASE("posterior factorization identity holds over a grid of states") {
  // log p_t(x_t|y) - log p_tilde(x_tilde) - log N(y; x_t, (sy^2+st^2) I)
  // is constant in x_t.
  const auto dw = test::double_well();
  const std::vector<double> y{0.4, 0.9};
  const double sy = 0.3, st = 0.9;
  std::vector<double> diffs;
  for (double a : {-2.0, -0.5, 0.5, 1.5})
    for (double b : {-1.0, 0.3, 2.0, 2.8}) {
      const std::vector<double> x{a, b};
      const auto tp = tilde_params(y, x, sy, st);
      const double lhs = dw_quad().log_joint_denoise(x, y, sy, st);
      double log_n = 0.0;
      for (std::size_t j = 0; j < 2; ++j)
        log_n += test::log_normal_pdf(y[j], x[j], tp.guidance_var);
      const double rhs =
          log_density_perturbed(dw, tp.x_tilde, NoiseCov::isotropic(tp.sigma_tilde_sq)) + log_n;
      diffs.push_back(lhs - rhs);
    }
  CHECK(stddev(diffs) < 1e-8);
}

TEST_CASE("inpainting score with an all-ones mask reduces to denoising") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.2, 1.1}, y{-0.4, 0.8};
  const std::vector<int> mask{1, 1};
  const auto inp = exact_inpainting_score(dw, x, mask, y, 0.25, 0.6);
  const auto den = exact_denoising_score(dw, x, y, 0.25, 0.6);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::abs(inp.posterior_score[j] - den.posterior_score[j]) < 1e-12);
    CHECK(std::abs(inp.prior_term[j] - den.prior_term[j]) < 1e-12);
    CHECK(std::abs(inp.guidance_term[j] - den.guidance_term[j]) < 1e-12);
  }
}

TEST_CASE("inpainting score with an all-zeros mask reduces to the unconditional score") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.2, 1.1}, y{0.0, 0.0};
  const std::vector<int> mask{0, 0};
  const auto inp = exact_inpainting_score(dw, x, mask, y, 0.25, 0.6);
  const auto uncond = score_perturbed(dw, x, NoiseCov::isotropic(0.36));
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(std::abs(inp.posterior_score[j] - uncond[j]) < 1e-12);
}

TEST_CASE("inpainting score factorizes over independent coordinates") {
  // Product prior: 2-component mixture on coordinate 0, single gaussian on
  // coordinate 1 (shared across components so the joint factorizes).
  GaussianMixture joint(2, {{0.4, {-1.0, 0.5}, {0.3, 0.7}}, {0.6, {2.0, 0.5}, {0.5, 0.7}}});
  GaussianMixture coord0(1, {{0.4, {-1.0}, {0.3}}, {0.6, {2.0}, {0.5}}});
  const double sy = 0.2, st = 0.45;
  const std::vector<double> x{0.3, -0.8}, y{0.9, 0.0};
  const std::vector<int> mask{1, 0};
  const auto inp = exact_inpainting_score(joint, x, mask, y, sy, st);

  // Masked coordinate: unconditional 1-D score of N(0.5, 0.7).
  const double expected_masked = -(x[1] - 0.5) / (0.7 + st * st);
  CHECK(std::abs(inp.posterior_score[1] - expected_masked) < 1e-10);

  // Observed coordinate: 1-D exact denoising score of the coordinate-0 prior.
  const auto den0 = exact_denoising_score(coord0, std::vector<double>{x[0]},
                                          std::vector<double>{y[0]}, sy, st);
  CHECK(std::abs(inp.posterior_score[0] - den0.posterior_score[0]) < 1e-10);
}

TEST_CASE("inpainting score matches the quadrature gradient for both masks") {
  const auto dw = test::double_well();
  const double sy = 0.3, st = 0.7;
  for (const auto& mask : {std::vector<int>{1, 0}, std::vector<int>{0, 1}}) {
    std::vector<double> y{0.0, 0.0};
    y[mask[0] == 1 ? 0 : 1] = 0.8;
    const std::vector<double> x{0.4, 0.9};
    const auto g = exact_inpainting_score(dw, x, mask, y, sy, st);
    const auto fd = test::fd_gradient(
        [&](std::span<const double> p) {
          return dw_quad().log_joint_inpaint(p, mask, y, sy, st);
        },
        x, 1e-5);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(g.posterior_score[j] - fd[j]) < 1e-5);
  }
}

TEST_CASE("noiseless inpainting pins observed components exactly") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.9, -0.2}, y{0.5, 0.0};
  const std::vector<int> mask{1, 0};
  const double st = 0.4;
  const auto g = exact_inpainting_score(dw, x, mask, y, 0.0, st);
  CHECK(g.posterior_score[0] == -(x[0] - y[0]) / (st * st));
  CHECK(g.prior_term[0] == 0.0);
  CHECK(std::isfinite(g.posterior_score[1]));
}

TEST_CASE("observed coordinates of denoising and inpainting agree as sigma_y -> 0") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.9, -0.2}, y{0.5, 0.0};
  const std::vector<int> mask{1, 0};
  const double sy = 1e-6, st = 0.4;
  const auto inp = exact_inpainting_score(dw, x, mask, y, sy, st);
  const auto den = exact_denoising_score(dw, x, y, sy, st);
  CHECK(std::abs(inp.posterior_score[0] - den.guidance_term[0]) < 1e-6);
}

TEST_CASE("invertible form with a unit diagonal reduces to denoising") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.1, 0.6}, y{-0.9, 1.4}, d{1.0, 1.0};
  const auto inv = exact_invertible_score(dw, x, d, y, 0.3, 0.8);
  const auto den = exact_denoising_score(dw, x, y, 0.3, 0.8);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::abs(inv.posterior_score[j] - den.posterior_score[j]) < 1e-12);
    CHECK(std::abs(inv.prior_term[j] - den.prior_term[j]) < 1e-12);
  }
}

TEST_CASE("invertible form converges to the inpainting form as delta -> 0") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.7, -0.4}, y{0.3, 0.0};
  const double delta = 1e-4;
  const auto inv = exact_invertible_score(dw, x, std::vector<double>{1.0, delta}, y, 0.2, 0.6);
  const auto inp = exact_inpainting_score(dw, x, std::vector<int>{1, 0}, y, 0.2, 0.6);
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(std::abs(inv.posterior_score[j] - inp.posterior_score[j]) < 1e-2);
}

TEST_CASE("scalar invertible case matches the conjugate closed form") {
  const auto prior = iso_gauss(1, 0.2, 1.44);
  const std::vector<double> x{0.9}, y{1.8}, d{2.0};
  const double sy = 0.4, st = 0.6;
  const auto g = exact_invertible_score(prior, x, d, y, sy, st);
  // Likelihood N(y; 2 x0, sy^2) as a function of x0 is N(x0; y/2, sy^2/4).
  const double s2 = 1.0 / (1.0 / 1.44 + 4.0 / (sy * sy));
  const double m = s2 * (0.2 / 1.44 + 2.0 * y[0] / (sy * sy));
  const double expected = -(x[0] - m) / (s2 + st * st);
  CHECK(std::abs(g.posterior_score[0] - expected) < 1e-10);
}

TEST_CASE("tweedie mean approaches the state as sigma_t -> 0") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.4, 1.0};
  const auto xhat = tweedie_mean_ve(dw, x, 1e-6);
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(xhat[j] - x[j]) < 1e-4);
}

TEST_CASE("tweedie mean of a single gaussian is the conjugate posterior mean") {
  const auto prior = iso_gauss(2, 0.7, 0.64);
  const std::vector<double> x{1.5, -0.3};
  const double st = 0.9;
  const auto xhat = tweedie_mean_ve(prior, x, st);
  for (std::size_t j = 0; j < 2; ++j) {
    const double expected = (0.64 * x[j] + st * st * 0.7) / (0.64 + st * st);
    CHECK(std::abs(xhat[j] - expected) < 1e-12);
  }
}

TEST_CASE("tweedie mean is the MMSE estimate") {
  const auto dw = test::double_well();
  const double st = 1.0;
  const std::size_t n = 100000;
  const auto draws = sample_prior(dw, 555, n);
  Rng rng(556);
  double mse_tweedie = 0.0;
  std::vector<double> mse_perturbed(8, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x_t(2);
    for (std::size_t j = 0; j < 2; ++j) x_t[j] = draws[i][j] + st * rng.normal();
    const auto xhat = tweedie_mean_ve(dw, x_t, st);
    for (std::size_t j = 0; j < 2; ++j) {
      const double e = draws[i][j] - xhat[j];
      mse_tweedie += e * e;
    }
    for (std::size_t k = 0; k < 8; ++k) {
      const double ang = 2.0 * M_PI * static_cast<double>(k) / 8.0;
      const double ux = 0.1 * std::cos(ang), uy = 0.1 * std::sin(ang);
      const double e0 = draws[i][0] - (xhat[0] + ux);
      const double e1 = draws[i][1] - (xhat[1] + uy);
      mse_perturbed[k] += e0 * e0 + e1 * e1;
    }
  }
  mse_tweedie /= static_cast<double>(n);
  double best_perturbed = mse_perturbed[0];
  for (double v : mse_perturbed) best_perturbed = std::min(best_perturbed, v);
  best_perturbed /= static_cast<double>(n);
  CHECK(mse_tweedie <= best_perturbed);
  CHECK(std::abs(mse_tweedie - best_perturbed) < 0.02 * best_perturbed);
}

TEST_CASE("dps score vanishes on an exact residual") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.3, 0.8};
  const double st = 0.5;
  Measurement m;
  m.op = LinearOperator::identity();
  m.sigma_y = 0.1;
  m.y = tweedie_mean_ve(dw, x, st);
  const auto s = dps_score_ve(dw, x, m, st, 1.0);
  CHECK(norm2(s) == 0.0);
}

TEST_CASE("dps score is parallel to the residual for a gaussian prior") {
  const auto prior = iso_gauss(2, 0.0, 1.0);
  const std::vector<double> x{1.2, -0.7};
  const double st = 0.8;
  Measurement m;
  m.op = LinearOperator::identity();
  m.sigma_y = 0.1;
  m.y = {0.5, 0.5};
  const auto s = dps_score_ve(prior, x, m, st, 1.0);
  const auto xhat = tweedie_mean_ve(prior, x, st);
  const auto r = sub(m.y, xhat);
  // J = (1 - st^2/(1+st^2)) I, so s = 2 J r is a positive multiple of r.
  const double jscale = 1.0 / (1.0 + st * st);
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(s[j] == doctest::Approx(2.0 * jscale * r[j]).epsilon(1e-12));
}

TEST_CASE("dps score matches the finite-difference gradient of the residual norm") {
  Rng rng(17);
  const auto g = test::random_gmm(rng, 2, 3);
  const std::vector<double> x{0.4, -0.2};
  const double st = 0.6, zeta = 0.7;
  Measurement m;
  m.op = LinearOperator::mask({1, 0});
  m.sigma_y = 0.1;
  m.y = {1.1, 0.0};
  const auto s = dps_score_ve(g, x, m, st, zeta);
  const auto fd = test::fd_gradient(
      [&](std::span<const double> p) {
        const auto xhat = tweedie_mean_ve(g, p, st);
        const auto ax = m.op.apply(xhat);
        double acc = 0.0;
        for (std::size_t j = 0; j < 2; ++j) acc += (m.y[j] - ax[j]) * (m.y[j] - ax[j]);
        return acc;
      },
      x, 1e-5);
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(s[j] + zeta * fd[j]) < 1e-4);
}

TEST_CASE("noisy likelihood score is the posterior minus the unconditional score") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.2, -1.0}, y{0.6, 0.4};
  const double sy = 0.15, st = 0.7;
  const auto nl = exact_noisy_likelihood_score(dw, x, y, sy, st);
  const auto post = exact_denoising_score(dw, x, y, sy, st);
  const auto uncond = score_perturbed(dw, x, NoiseCov::isotropic(st * st));
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(std::abs(nl[j] - (post.posterior_score[j] - uncond[j])) < 1e-12);
}

TEST_CASE("noisy likelihood score vanishes for an uninformative measurement") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.2, -1.0}, y{0.6, 0.4};
  const auto nl = exact_noisy_likelihood_score(dw, x, y, 1e9, 0.7);
  CHECK(norm2(nl) < 1e-6);
}

TEST_CASE("1-D gaussian noisy likelihood matches the linear-gaussian oracle") {
  const auto prior = iso_gauss(1, 0.3, 1.21);
  const std::vector<double> x{1.4}, y{0.2};
  const double sy = 0.25, st = 0.5;
  const auto nl = exact_noisy_likelihood_score(prior, x, y, sy, st);
  // p(y | x_t) = N(y; xhat0(x_t), sy^2 + Var[x0|x_t]), all gaussian.
  const double var0 = 1.21, mu0 = 0.3;
  const double st2 = st * st;
  const double xhat = (var0 * x[0] + st2 * mu0) / (var0 + st2);
  const double dxhat = var0 / (var0 + st2);
  const double cond_var = var0 * st2 / (var0 + st2);
  const double expected = (y[0] - xhat) / (sy * sy + cond_var) * dxhat;
  CHECK(std::abs(nl[0] - expected) < 1e-10);
}

TEST_CASE("dps-w weight reconstructs the exact score for a gaussian prior") {
  const auto prior = iso_gauss(3, 0.0, 1.0);
  Measurement ref;
  ref.op = LinearOperator::identity();
  ref.sigma_y = 0.2;
  ref.y = {0.4, -0.6, 1.0};
  const std::vector<double> x{1.0, 0.3, -0.5};
  for (double st : {0.05, 0.5, 2.0, 20.0}) {
    const auto w = dps_w_weight(prior, x, ref, st, false);
    REQUIRE(!w.degenerate);
    const auto s_exact = exact_noisy_likelihood_score(prior, x, ref.y, ref.sigma_y, st);
    const auto s_ref = dps_score_ve(prior, x, ref, st, 1.0);
    double resid = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double r = s_exact[j] - w.w * s_ref[j];
      resid += r * r;
    }
    CHECK(std::sqrt(resid) < 1e-9);
  }
}

TEST_CASE("dps-w weight scales inversely with the reference score") {
  const auto dw = test::double_well();
  Measurement ref;
  ref.op = LinearOperator::identity();
  ref.sigma_y = 0.1;
  ref.y = {0.2, 0.9};
  const std::vector<double> x{1.3, -0.8};
  const double st = 0.7, c = 3.7;
  const auto s_exact = exact_noisy_likelihood_score(dw, x, ref.y, ref.sigma_y, st);
  const auto s_ref = dps_score_ve(dw, x, ref, st, 1.0);
  const auto s_ref_scaled = dps_score_ve(dw, x, ref, st, c);
  const double w1 = dot(s_exact, s_ref) / dot(s_ref, s_ref);
  const double wc = dot(s_exact, s_ref_scaled) / dot(s_ref_scaled, s_ref_scaled);
  CHECK(wc == doctest::Approx(w1 / c).epsilon(1e-12));
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(wc * s_ref_scaled[j] == doctest::Approx(w1 * s_ref[j]).epsilon(1e-12));
}

TEST_CASE("dps-w projection is least-squares optimal") {
  const auto dw = test::double_well();
  Measurement ref;
  ref.op = LinearOperator::identity();
  ref.sigma_y = 0.15;
  ref.y = {-0.5, 1.2};
  const std::vector<double> x{0.8, 0.1};
  const double st = 1.1;
  const auto w = dps_w_weight(dw, x, ref, st, false);
  const auto s_exact = exact_noisy_likelihood_score(dw, x, ref.y, ref.sigma_y, st);
  const auto s_ref = dps_score_ve(dw, x, ref, st, 1.0);
  auto err = [&](double alpha) {
    double acc = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      const double r = s_exact[j] - alpha * s_ref[j];
      acc += r * r;
    }
    return acc;
  };
  const double best = err(w.w);
  for (double alpha = -2.0; alpha <= 2.0; alpha += 0.05) {
    if (std::abs(alpha - w.w) < 1e-9) continue;
    CHECK(err(alpha) > best);
  }
}

TEST_CASE("degenerate reference score yields a flagged zero weight") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.3, 0.8};
  const double st = 0.5;
  Measurement ref;
  ref.op = LinearOperator::identity();
  ref.sigma_y = 0.1;
  ref.y = tweedie_mean_ve(dw, x, st);  // zero residual
  const auto w = dps_w_weight(dw, x, ref, st, false);
  CHECK(w.degenerate);
  CHECK(w.w == 0.0);
}

TEST_CASE("masked reference projects both scores before the fit") {
  const auto dw = test::double_well();
  Measurement ref;
  ref.op = LinearOperator::mask({1, 0});
  ref.sigma_y = 0.35;
  ref.y = {0.5, 0.0};
  const std::vector<double> x{0.1, 2.2};
  const double st = 0.9;
  const auto w = dps_w_weight(dw, x, ref, st, false);
  auto s_exact = exact_noisy_likelihood_score(dw, x, ref.y, ref.sigma_y, st);
  auto s_ref = dps_score_ve(dw, x, ref, st, 1.0);
  s_exact[1] = 0.0;
  s_ref[1] = 0.0;
  const double expected = dot(s_exact, s_ref) / dot(s_ref, s_ref);
  CHECK(w.w == doctest::Approx(expected).epsilon(1e-14));

  const auto enhanced = dps_w_weight(dw, x, ref, st, true);
  CHECK(enhanced.w == doctest::Approx(expected * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("enhanced weights require a mask reference") {
  const auto dw = test::double_well();
  Measurement ref;
  ref.op = LinearOperator::identity();
  ref.sigma_y = 0.1;
  ref.y = {0.0, 0.0};
  CHECK_THROWS_AS(dps_w_weight(dw, std::vector<double>{0.0, 0.0}, ref, 0.5, true),
                  std::invalid_argument);
}

TEST_CASE("dps-w weights on the double well grow towards the end of the schedule") {
  const auto dw = test::double_well();
  const auto schedule = make_vp_linear(1000, 1e-4, 0.02);
  const auto x0 = sample_prior(dw, 808, 1)[0];
  const Measurement m = forward_model(x0, LinearOperator::identity(), 0.05, 809);
  GuidanceSpec spec;
  spec.method = GuidanceMethod::DpsW;
  SamplerOptions opts;
  opts.record_steps = true;
  const auto traj = ancestral_sample(dw, schedule, spec, &m, 810, opts);
  std::vector<double> first_half, second_half;
  for (const auto& s : traj.steps) {
    if (!s.w_t) continue;
    // Steps run from t = 999 down to 0; the first half is large t.
    (s.t >= 500 ? first_half : second_half).push_back(*s.w_t);
  }
  CHECK(mean(first_half) < mean(second_half));
}

TEST_CASE("term ratio favors the guidance term at high noise levels") {
  const auto dw = test::double_well();
  Rng rng(99);
  for (double sy : {0.05, 0.2}) {
    const auto x0 = sample_prior(dw, 42, 1)[0];
    const Measurement m = forward_model(x0, LinearOperator::identity(), sy, 43);
    for (double st : {1.0, 2.0, 5.0, 20.0, 150.0}) {
      for (int rep = 0; rep < 5; ++rep) {
        const auto xp = sample_prior(dw, 100 + rep, 1)[0];
        std::vector<double> x_t(2);
        for (std::size_t j = 0; j < 2; ++j) x_t[j] = xp[j] + st * rng.normal();
        const auto g = exact_denoising_score(dw, x_t, m.y, sy, st);
        CHECK(norm2(g.guidance_term) / norm2(g.prior_term) > 1.0);
      }
    }
  }
}

TEST_CASE("vp entry points equal the ve forms in converted coordinates") {
  const auto dw = test::double_well();
  const std::vector<double> y{0.1, 0.8};
  const double sy = 0.2, abar = 0.37;
  const std::vector<double> x_vp{0.5, -0.9};
  const double scale = 1.0 / std::sqrt(abar);
  const std::vector<double> u{x_vp[0] * scale, x_vp[1] * scale};
  const double sigma = std::sqrt((1.0 - abar) / abar);

  const auto vp = exact_denoising_score_vp(dw, x_vp, y, sy, abar);
  const auto ve = exact_denoising_score(dw, u, y, sy, sigma);
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(vp.posterior_score[j] == doctest::Approx(scale * ve.posterior_score[j]).epsilon(1e-14));

  const auto xhat_vp = tweedie_mean_vp(dw, x_vp, abar);
  const auto xhat_ve = tweedie_mean_ve(dw, u, sigma);
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(xhat_vp[j] == doctest::Approx(xhat_ve[j]).epsilon(1e-14));
}

TEST_CASE("noise-level preconditions are enforced") {
  const auto dw = test::double_well();
  const std::vector<double> x{0.0, 0.0}, y{0.0, 0.0};
  CHECK_THROWS_AS(exact_denoising_score(dw, x, y, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(exact_denoising_score(dw, x, y, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(
      exact_invertible_score(dw, x, std::vector<double>{1.0, 0.0}, y, 0.5, 0.5),
      std::invalid_argument);
  CHECK_THROWS_AS(exact_inpainting_score(dw, x, std::vector<int>{1, 0}, y, -0.1, 0.5),
                  std::invalid_argument);
}

}  // TEST_SUITE
