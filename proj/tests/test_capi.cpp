#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "gdlab/gdlab.h"

#include "gmm.hpp"
#include "guidance.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

TEST_SUITE("capi") {

TEST_CASE("version and error strings are always valid") {
  CHECK(std::strlen(gdlab_version()) > 0);
  CHECK(gdlab_last_error() != nullptr);
}

TEST_CASE("preset handles evaluate like the core library") {
  gdlab_gmm* gmm = nullptr;
  REQUIRE(gdlab_gmm_from_preset("doublewell2d", &gmm) == GDLAB_OK);
  REQUIRE(gmm != nullptr);
  CHECK(gdlab_gmm_dim(gmm) == 2);

  const double x[2] = {0.4, -0.2};
  const double noise = 0.25;
  double logp = 0.0, score[2], hess[4];
  REQUIRE(gdlab_gmm_eval(gmm, x, 2, GDLAB_NOISE_ISOTROPIC, &noise, &logp, score, hess) ==
          GDLAB_OK);

  const auto dw = gdlab::test::double_well();
  const auto cov = gdlab::NoiseCov::isotropic(noise);
  const std::vector<double> xs{0.4, -0.2};
  CHECK(logp == gdlab::log_density_perturbed(dw, xs, cov));
  const auto s = gdlab::score_perturbed(dw, xs, cov);
  CHECK(score[0] == s[0]);
  CHECK(score[1] == s[1]);
  const auto h = gdlab::hessian_perturbed(dw, xs, cov);
  for (int k = 0; k < 4; ++k) CHECK(hess[k] == h[k]);

  gdlab_gmm_free(gmm);
}

TEST_CASE("json construction and invariant violations") {
  gdlab_gmm* gmm = nullptr;
  const char* good =
      R"({"dim": 1, "components": [{"weight": 1.0, "mean": [0.0], "var": [1.0]}]})";
  REQUIRE(gdlab_gmm_from_json(good, &gmm) == GDLAB_OK);
  gdlab_gmm_free(gmm);

  gdlab_gmm* bad = nullptr;
  CHECK(gdlab_gmm_from_json("{\"dim\": 1}", &bad) == GDLAB_ERROR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(std::strlen(gdlab_last_error()) > 0);
  CHECK(gdlab_gmm_from_preset("unknown", &bad) == GDLAB_ERROR_CONFIG);
  CHECK(gdlab_gmm_from_json(nullptr, &bad) == GDLAB_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("sampling through the c api is deterministic") {
  gdlab_gmm* gmm = nullptr;
  REQUIRE(gdlab_gmm_from_preset("gauss1d", &gmm) == GDLAB_OK);
  double a[8], b[8];
  REQUIRE(gdlab_gmm_sample(gmm, 123, 8, a) == GDLAB_OK);
  REQUIRE(gdlab_gmm_sample(gmm, 123, 8, b) == GDLAB_OK);
  for (int i = 0; i < 8; ++i) CHECK(a[i] == b[i]);
  gdlab_gmm_free(gmm);
}

TEST_CASE("schedules expose their sigma ladder") {
  gdlab_schedule* s = nullptr;
  REQUIRE(gdlab_schedule_vp_linear(100, 1e-4, 0.02, &s) == GDLAB_OK);
  CHECK(gdlab_schedule_steps(s) == 100);
  double lo = 0.0, hi = 0.0;
  REQUIRE(gdlab_schedule_sigma(s, 1, &lo) == GDLAB_OK);
  REQUIRE(gdlab_schedule_sigma(s, 100, &hi) == GDLAB_OK);
  CHECK(lo > 0.0);
  CHECK(hi > lo);
  CHECK(gdlab_schedule_sigma(s, 101, &hi) == GDLAB_ERROR_INVALID_ARGUMENT);
  gdlab_schedule_free(s);

  CHECK(gdlab_schedule_ve_geometric(10, 2.0, 1.0, &s) == GDLAB_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("posterior scores through the c api match the core") {
  gdlab_gmm* gmm = nullptr;
  REQUIRE(gdlab_gmm_from_preset("doublewell2d", &gmm) == GDLAB_OK);
  const double x[2] = {0.5, -0.5}, y[2] = {0.0, 0.0};
  double post[2], prior[2], guide[2];
  REQUIRE(gdlab_denoising_score(gmm, x, y, 2, 0.2, 0.5, post, prior, guide) == GDLAB_OK);
  for (int j = 0; j < 2; ++j) CHECK(post[j] == prior[j] + guide[j]);

  const auto dw = gdlab::test::double_well();
  const auto g = gdlab::exact_denoising_score(dw, std::vector<double>{0.5, -0.5},
                                              std::vector<double>{0.0, 0.0}, 0.2, 0.5);
  CHECK(post[0] == g.posterior_score[0]);
  CHECK(post[1] == g.posterior_score[1]);

  const int32_t mask[2] = {1, 0};
  const double ym[2] = {0.4, 0.0};
  REQUIRE(gdlab_inpainting_score(gmm, x, mask, ym, 2, 0.0, 0.5, post, nullptr, nullptr) ==
          GDLAB_OK);
  CHECK(post[0] == -(x[0] - ym[0]) / 0.25);

  double xhat[2];
  REQUIRE(gdlab_tweedie_mean(gmm, x, 2, 0.3, xhat) == GDLAB_OK);
  CHECK(std::isfinite(xhat[0]));

  double w = 0.0;
  int degenerate = -1;
  REQUIRE(gdlab_dps_w_weight(gmm, x, y, 2, nullptr, 0.1, 0.5, 0, &w, &degenerate) == GDLAB_OK);
  CHECK(degenerate == 0);
  CHECK(std::isfinite(w));

  CHECK(gdlab_denoising_score(gmm, x, y, 2, 0.0, 0.5, post, nullptr, nullptr) ==
        GDLAB_ERROR_INVALID_ARGUMENT);
  CHECK(gdlab_denoising_score(gmm, x, y, 3, 0.1, 0.5, post, nullptr, nullptr) ==
        GDLAB_ERROR_INVALID_ARGUMENT);
  gdlab_gmm_free(gmm);
}

TEST_CASE("config validation and execution return the documented codes") {
  CHECK(gdlab_validate_config(R"({"task": "sample", "prior": "gauss1d"})") == GDLAB_OK);
  CHECK(gdlab_validate_config(R"({"task": "sample"})") == GDLAB_ERROR_CONFIG);
  CHECK(gdlab_validate_config("][") == GDLAB_ERROR_CONFIG);
  CHECK(std::string(gdlab_last_error()).find("invalid JSON") != std::string::npos);

  const fs::path dir = fs::temp_directory_path() / "gdlab_capi_run";
  fs::remove_all(dir);
  const std::string cfg = R"({
    "task": "sample", "prior": "gauss1d",
    "schedule": {"process": "vp", "steps": 50},
    "guidance": {"method": "none"},
    "trajectories": 5,
    "output_dir": ")" + dir.string() + R"("
  })";
  char summary[256] = {0};
  CHECK(gdlab_run_config(cfg.c_str(), summary, sizeof(summary)) == GDLAB_OK);
  CHECK(std::strlen(summary) > 0);
  CHECK(fs::exists(dir / "finals.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  fs::remove_all(dir);
}

}  // TEST_SUITE
