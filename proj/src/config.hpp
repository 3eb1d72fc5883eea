#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmm.hpp"
#include "guidance.hpp"
#include "operators.hpp"
#include "schedule.hpp"
#include "umbrella.hpp"

namespace gdlab {

enum class Task { Sample, Umbrella, Diagnose, Curves };

struct ScheduleConfig {
  Process process = Process::VP;
  std::size_t steps = 1000;
  double beta_min = 1e-4;
  double beta_max = 0.02;
  double sigma_min = 0.01;
  double sigma_max = 20.0;

  NoiseSchedule build() const;
};

struct MeasurementConfig {
  LinearOperator op = LinearOperator::identity();
  double sigma_y = 0.05;
  std::optional<std::vector<double>> y;
  // When y is absent, draw x0 from the prior with this seed and push it
  // through the forward model.
  std::uint64_t synthesize_seed = 0;

  Measurement build(const GaussianMixture& gmm) const;
};

struct UmbrellaConfig {
  double center_min = -3.5;
  double center_max = 3.0;
  std::size_t windows = 15;
  double sigma_y = 0.35;
  std::size_t samples_per_window = 2000;
  double bin_min = -4.0;
  double bin_max = 3.5;
  std::size_t bins = 60;
  double wham_tol = 1e-8;
  std::size_t wham_max_iter = 100000;

  WindowSet window_set() const;
  std::vector<double> bin_edges() const;
};

struct DiagnoseConfig {
  std::size_t conditions = 200;
  std::size_t samples_per_condition = 40;
};

struct CurvesConfig {
  std::vector<double> sigma_y_list = {0.01, 0.05, 0.2};
};

struct ExperimentConfig {
  Task task = Task::Sample;
  std::string prior_preset;          // empty when inline components are given
  std::optional<GaussianMixture> prior_inline;
  ScheduleConfig schedule;
  GuidanceSpec guidance;
  MeasurementConfig measurement;
  UmbrellaConfig umbrella;
  DiagnoseConfig diagnose;
  CurvesConfig curves;
  std::string output_dir = "gdlab_out";
  std::uint64_t master_seed = 1234;
  std::size_t trajectories = 1000;
  bool record_trajectories = false;
  unsigned jobs = 1;

  GaussianMixture build_prior() const;
};

// Parses and validates; throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);

// Round-trip used for the manifest echo.
nlohmann::json config_to_json(const ExperimentConfig& c);

}  // namespace gdlab
