#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rng.hpp"
#include "stats.hpp"

using namespace gdlab;

TEST_SUITE("stats") {

TEST_CASE("ks statistic closed form at n = 1") {
  for (double x : {-1.3, 0.0, 0.8}) {
    const double d = ks_statistic({x}, [](double v) { return normal_cdf(v); });
    const double f = normal_cdf(x);
    CHECK(d == doctest::Approx(std::max(f, 1.0 - f)).epsilon(1e-14));
  }
}

TEST_CASE("ks p-values are uniform under the null") {
  // 100 independent runs of 1e6 standard-normal draws; decile chi-square.
  const int runs = 100;
  const std::size_t n = 1000000;
  std::vector<int> deciles(10, 0);
  std::vector<double> buf(n);
  for (int r = 0; r < runs; ++r) {
    Rng rng(9000 + r);
    for (auto& v : buf) v = rng.normal();
    const double d = ks_statistic(buf, [](double v) { return normal_cdf(v); });
    const double p = ks_pvalue(d, n);
    const int bin = std::min(9, static_cast<int>(p * 10.0));
    ++deciles[bin];
  }
  double chi2 = 0.0;
  for (int c : deciles) chi2 += (c - 10.0) * (c - 10.0) / 10.0;
  // 99.5th percentile of chi-square with 9 dof.
  CHECK(chi2 < 23.59);
}

TEST_CASE("ks detects a wrong scale") {
  Rng rng(77);
  std::vector<double> samples(5000);
  for (auto& v : samples) v = 1.3 * rng.normal();
  const double d = ks_statistic(samples, [](double v) { return normal_cdf(v); });
  CHECK(ks_pvalue(d, samples.size()) < 1e-6);
}

TEST_CASE("pearson r of independent streams concentrates near zero") {
  const std::size_t n = 2000;
  int inside = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Rng rng(300 + rep);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
    }
    if (std::abs(pearson_r(a, b)) < 4.0 / std::sqrt(static_cast<double>(n))) ++inside;
  }
  CHECK(inside >= 99);
}

TEST_CASE("pearson r is exactly one for a linear relation") {
  std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  std::vector<double> b{2.0, 4.0, 6.0, 8.0};
  CHECK(pearson_r(a, b) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("wasserstein distance of identical samples is zero and shifts add up") {
  Rng rng(5);
  std::vector<double> a(1000);
  for (auto& v : a) v = rng.normal();
  CHECK(wasserstein1(a, a) == 0.0);
  std::vector<double> shifted(a);
  for (auto& v : shifted) v += 0.25;
  CHECK(wasserstein1(a, shifted) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("wasserstein handles unequal sample sizes") {
  std::vector<double> a{0.0, 1.0};
  std::vector<double> b{0.0, 0.5, 1.0};
  // F_a and F_b differ by 1/6 on average over [0, 1].
  CHECK(wasserstein1(a, b) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("sample moments") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(mean(v) == doctest::Approx(2.5));
  CHECK(variance(v) == doctest::Approx(5.0 / 3.0));
  CHECK_THROWS_AS(mean(std::vector<double>{}), std::invalid_argument);
}

}  // TEST_SUITE
