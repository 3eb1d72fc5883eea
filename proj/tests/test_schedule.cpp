#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "schedule.hpp"

using namespace gdlab;

TEST_SUITE("schedule") {

TEST_CASE("vp linear first and last alphabars") {
  const auto s = make_vp_linear(1000, 1e-4, 0.02);
  CHECK(s.alphabar(1) == doctest::Approx(1.0 - 1e-4).epsilon(1e-14));

  // Direct product oracle.
  double prod = 1.0;
  for (std::size_t t = 1; t <= 1000; ++t) {
    const double beta = 1e-4 + (0.02 - 1e-4) * static_cast<double>(t - 1) / 999.0;
    prod *= 1.0 - beta;
  }
  CHECK(s.alphabar(1000) == doctest::Approx(prod).epsilon(1e-12));
}

TEST_CASE("two-step vp product") {
  const auto s = NoiseSchedule::vp({0.1, 0.2});
  CHECK(s.alphabar(2) == doctest::Approx(0.72).epsilon(1e-14));
}

TEST_CASE("vp to ve sigma") {
  const auto s = NoiseSchedule::vp({0.5, 0.5});  // alphabar: 0.5, 0.25
  CHECK(vp_to_ve_sigma(s, 1) == doctest::Approx(1.0).epsilon(1e-14));
  const auto s2 = NoiseSchedule::vp({0.2, 0.2});  // alphabar_1 = 0.8
  CHECK(vp_to_ve_sigma(s2, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(vp_to_ve_sigma(s, 3), std::invalid_argument);
}

TEST_CASE("converted sigma is monotone increasing over a paper-scale schedule") {
  const auto s = make_vp_linear(1000, 1e-4, 0.02);
  double prev = 0.0;
  for (std::size_t t = 1; t <= 1000; ++t) {
    const double cur = vp_to_ve_sigma(s, t);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("sigma round trip through alphabar") {
  const auto s = make_vp_linear(100, 1e-3, 0.1);
  for (std::size_t t : {1ul, 17ul, 50ul, 100ul}) {
    const double sigma = vp_to_ve_sigma(s, t);
    CHECK(alphabar_from_sigma(sigma) == doctest::Approx(s.alphabar(t)).epsilon(1e-12));
  }
}

TEST_CASE("tilde params with equal noise levels") {
  const std::vector<double> y{1.0, -2.0}, x{3.0, 4.0};
  const auto p = tilde_params(y, x, 0.1, 0.1);
  CHECK(p.sigma_tilde_sq == doctest::Approx(0.005).epsilon(1e-14));
  CHECK(p.x_tilde[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p.x_tilde[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.guidance_var == doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("uninformative measurement recovers the unconditional parameters") {
  const std::vector<double> y{5.0}, x{-1.0};
  const auto p = tilde_params(y, x, 1e9, 0.7);
  CHECK(std::abs(p.x_tilde[0] - x[0]) < 1e-9 * std::abs(x[0] - y[0]));
  CHECK(std::sqrt(p.sigma_tilde_sq) == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("strong measurement pulls x_tilde onto y") {
  const std::vector<double> y{2.0}, x{7.0};
  const auto p = tilde_params(y, x, 0.05, 10.0);
  CHECK(std::abs(p.x_tilde[0] - y[0]) < 2.5e-5 * std::abs(x[0] - y[0]));
  CHECK(std::abs(std::sqrt(p.sigma_tilde_sq) - 0.05) / 0.05 < 1.3e-5);
}

TEST_CASE("tilde params symmetry under swapping the two sources") {
  const std::vector<double> y{1.5}, x{-0.5};
  const auto a = tilde_params(y, x, 0.3, 0.8);
  const auto b = tilde_params(x, y, 0.8, 0.3);
  CHECK(a.sigma_tilde_sq == doctest::Approx(b.sigma_tilde_sq).epsilon(1e-14));
  CHECK(a.x_tilde[0] == doctest::Approx(b.x_tilde[0]).epsilon(1e-14));
}

TEST_CASE("combined precision beats both sources") {
  for (double sy : {0.05, 0.3, 2.0})
    for (double st : {0.1, 1.0, 10.0}) {
      const std::vector<double> y{0.0}, x{1.0};
      const auto p = tilde_params(y, x, sy, st);
      CHECK(p.sigma_tilde_sq < sy * sy);
      CHECK(p.sigma_tilde_sq < st * st);
    }
}

TEST_CASE("x_tilde lies between y and x_t coordinatewise") {
  const std::vector<double> y{-1.0, 4.0}, x{2.0, -3.0};
  const auto p = tilde_params(y, x, 0.4, 0.9);
  for (std::size_t j = 0; j < 2; ++j) {
    const double lo = std::min(y[j], x[j]);
    const double hi = std::max(y[j], x[j]);
    CHECK(p.x_tilde[j] >= lo);
    CHECK(p.x_tilde[j] <= hi);
  }
}

TEST_CASE("inpainting effective covariance") {
  const std::vector<int> mask{1, 0};
  const auto cov = tilde_cov_inpaint(mask, 1.0, 1.0);
  CHECK(cov.entry(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cov.entry(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("all-masked window reduces to the unconditional level") {
  const std::vector<int> mask{0, 0};
  const auto cov = tilde_cov_inpaint(mask, 0.7, 0.3);
  CHECK(cov.entry(0) == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(cov.entry(1) == doctest::Approx(0.09).epsilon(1e-14));
}

TEST_CASE("noiseless observed pixels get exact zeros") {
  const std::vector<int> mask{1, 0};
  const auto cov = tilde_cov_inpaint(mask, 0.0, 0.3);
  CHECK(cov.entry(0) == 0.0);
  CHECK(cov.entry(1) == doctest::Approx(0.09).epsilon(1e-14));
}

TEST_CASE("all-ones mask equals the isotropic tilde variance") {
  const std::vector<int> mask{1, 1, 1};
  const auto cov = tilde_cov_inpaint(mask, 0.2, 0.5);
  const std::vector<double> y{0.0, 0.0, 0.0}, x{1.0, 1.0, 1.0};
  const auto p = tilde_params(y, x, 0.2, 0.5);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(cov.entry(j) == doctest::Approx(p.sigma_tilde_sq).epsilon(1e-14));
}

TEST_CASE("invalid schedules are rejected") {
  CHECK_THROWS_AS(make_vp_linear(1, 1e-4, 0.02), std::invalid_argument);
  CHECK_THROWS_AS(make_vp_linear(10, 0.02, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(make_vp_linear(10, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_ve_geometric(10, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSchedule::ve({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(tilde_params(std::vector<double>{0.0}, std::vector<double>{0.0}, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("nearest step lookup") {
  const auto s = make_ve_geometric(100, 0.01, 20.0);
  const std::size_t t = s.nearest_step(1.0);
  CHECK(std::abs(s.sigma(t) - 1.0) <= std::abs(s.sigma(t - 1) - 1.0));
  CHECK(std::abs(s.sigma(t) - 1.0) <= std::abs(s.sigma(t + 1) - 1.0));
}

}  // TEST_SUITE
