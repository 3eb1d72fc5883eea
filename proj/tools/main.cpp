// gdlab command-line front end. Builds a run configuration from a config
// file plus flag overrides (flags > file > preset defaults) and drives the
// library through the C API only.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gdlab/gdlab.h"

namespace {

using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<std::size_t> steps;
  std::string process;
  std::string method;
  std::optional<double> sigma_y;
  std::optional<double> zeta_prime;
  bool residual_scaled = false;
  bool enhanced = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "JSON config file");
  cmd->add_option("--preset", f.preset, "prior preset (doublewell2d, gauss1d)");
  cmd->add_option("-o,--output-dir", f.output_dir,
                  "output directory (default: $GDLAB_OUTPUT_DIR or ./gdlab_out)");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--jobs", f.jobs, "concurrent workers (default 1, sequential)");
  cmd->add_option("--steps", f.steps, "schedule steps");
  cmd->add_option("--process", f.process, "diffusion process: vp or ve");
  cmd->add_option("--method", f.method, "guidance method: none|exact|dps|dpsw");
  cmd->add_option("--sigma-y", f.sigma_y, "measurement noise level");
  cmd->add_option("--zeta-prime", f.zeta_prime, "DPS step-size constant");
  cmd->add_flag("--residual-scaled", f.residual_scaled,
                "use zeta_t = zeta_prime / ||y - A xhat0|| for DPS");
  cmd->add_flag("--enhanced", f.enhanced, "scale DPS-w weights by sqrt(d/d_observed)");
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "{\"error\":{\"kind\":\"config\",\"message\":\"cannot read %s\"}}\n",
                 path.c_str());
    std::exit(2);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const std::exception&) {
    std::fprintf(stderr, "{\"error\":{\"kind\":\"config\",\"message\":\"invalid JSON in %s\"}}\n",
                 path.c_str());
    std::exit(2);
  }
}

// Flags override file fields; the file overrides built-in defaults.
json assemble_config(const std::string& task, const CommonFlags& f,
                     const std::string& default_prior, const std::string& default_method,
                     const std::string& default_process) {
  json cfg = f.config_path.empty() ? json::object() : load_config_file(f.config_path);
  cfg["task"] = task;
  if (!f.preset.empty()) cfg["prior"] = f.preset;
  if (!cfg.contains("prior")) cfg["prior"] = default_prior;

  if (!f.output_dir.empty()) {
    cfg["output_dir"] = f.output_dir;
  } else if (!cfg.contains("output_dir")) {
    const char* env = std::getenv("GDLAB_OUTPUT_DIR");
    cfg["output_dir"] = env ? env : "gdlab_out";
  }
  if (f.seed) cfg["master_seed"] = *f.seed;
  if (f.jobs) cfg["jobs"] = *f.jobs;

  json sj = cfg.contains("schedule") ? cfg["schedule"] : json::object();
  if (!f.process.empty()) sj["process"] = f.process;
  if (!sj.contains("process")) sj["process"] = default_process;
  if (f.steps) sj["steps"] = *f.steps;
  cfg["schedule"] = sj;

  json gj = cfg.contains("guidance") ? cfg["guidance"] : json::object();
  if (!f.method.empty()) gj["method"] = f.method;
  if (!gj.contains("method")) gj["method"] = default_method;
  if (f.zeta_prime) gj["zeta_prime"] = *f.zeta_prime;
  if (f.residual_scaled) gj["residual_scaled"] = true;
  if (f.enhanced) gj["enhanced"] = true;
  cfg["guidance"] = gj;
  return cfg;
}

void apply_measurement_sigma(json& cfg, const CommonFlags& f) {
  if (!f.sigma_y) return;
  json mj = cfg.contains("measurement") ? cfg["measurement"] : json::object();
  mj["sigma_y"] = *f.sigma_y;
  cfg["measurement"] = mj;
}

int run(const json& cfg) {
  const std::string text = cfg.dump();
  char summary[1024] = {0};
  const gdlab_status status = gdlab_run_config(text.c_str(), summary, sizeof(summary));
  if (status != GDLAB_OK) {
    const char* kind = status == GDLAB_ERROR_CONFIG ? "config" : "numeric";
    json err = {{"error", {{"kind", kind}, {"message", gdlab_last_error()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return status == GDLAB_ERROR_CONFIG ? 2 : 3;
  }
  std::printf("%s\n", summary);
  std::printf("outputs written to %s\n", cfg.at("output_dir").get<std::string>().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gdlab: guided-diffusion sampling on analytic Gaussian-mixture priors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gdlab_version()));

  CommonFlags sample_flags, umbrella_flags, diagnose_flags, curves_flags;
  std::string validate_path;

  auto* sample = app.add_subcommand("sample", "draw guided or unconditional trajectories");
  add_common_flags(sample, sample_flags);
  std::optional<std::size_t> trajectories;
  bool record_trajectories = false;
  sample->add_option("-n,--trajectories", trajectories, "number of trajectories");
  sample->add_flag("--record-trajectories", record_trajectories,
                   "emit per-step trajectory detail CSV");

  auto* umbrella = app.add_subcommand("umbrella", "umbrella-sampling free-energy experiment");
  add_common_flags(umbrella, umbrella_flags);
  std::optional<std::size_t> windows, samples_per_window;
  umbrella->add_option("--windows", windows, "number of bias windows");
  umbrella->add_option("--samples-per-window", samples_per_window, "samples per window");

  auto* diagnose = app.add_subcommand("diagnose", "posterior-sampler necessary conditions");
  add_common_flags(diagnose, diagnose_flags);
  std::optional<std::size_t> conditions, samples_per_condition;
  diagnose->add_option("--conditions", conditions, "number of measurement conditions");
  diagnose->add_option("--samples-per-condition", samples_per_condition,
                       "posterior samples per condition");

  auto* curves = app.add_subcommand("curves", "w_t and term-ratio diagnostic series");
  add_common_flags(curves, curves_flags);
  std::vector<double> sigma_y_list;
  curves->add_option("--sigma-y-list", sigma_y_list, "sigma_y levels for the term-ratio series");

  auto* validate = app.add_subcommand("validate-config", "parse and validate a config file");
  validate->add_option("config", validate_path, "JSON config file")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    std::ifstream in(validate_path);
    if (!in) {
      std::fprintf(stderr, "{\"error\":{\"kind\":\"config\",\"message\":\"cannot read %s\"}}\n",
                   validate_path.c_str());
      return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const gdlab_status status = gdlab_validate_config(ss.str().c_str());
    if (status != GDLAB_OK) {
      json err = {{"error", {{"kind", "config"}, {"message", gdlab_last_error()}}}};
      std::fprintf(stderr, "%s\n", err.dump().c_str());
      return 2;
    }
    std::printf("config ok\n");
    return 0;
  }

  if (sample->parsed()) {
    json cfg = assemble_config("sample", sample_flags, "doublewell2d", "none", "vp");
    apply_measurement_sigma(cfg, sample_flags);
    if (trajectories) cfg["trajectories"] = *trajectories;
    if (record_trajectories) cfg["record_trajectories"] = true;
    return run(cfg);
  }
  if (umbrella->parsed()) {
    // The umbrella experiment defaults to the VE sampler.
    json cfg = assemble_config("umbrella", umbrella_flags, "doublewell2d", "exact", "ve");
    json uj = cfg.contains("umbrella") ? cfg["umbrella"] : json::object();
    if (windows) uj["windows"] = *windows;
    if (samples_per_window) uj["samples_per_window"] = *samples_per_window;
    if (umbrella_flags.sigma_y) uj["sigma_y"] = *umbrella_flags.sigma_y;
    cfg["umbrella"] = uj;
    return run(cfg);
  }
  if (diagnose->parsed()) {
    json cfg = assemble_config("diagnose", diagnose_flags, "gauss1d", "exact", "vp");
    apply_measurement_sigma(cfg, diagnose_flags);
    json dj = cfg.contains("diagnose") ? cfg["diagnose"] : json::object();
    if (conditions) dj["conditions"] = *conditions;
    if (samples_per_condition) dj["samples_per_condition"] = *samples_per_condition;
    cfg["diagnose"] = dj;
    return run(cfg);
  }
  if (curves->parsed()) {
    json cfg = assemble_config("curves", curves_flags, "doublewell2d", "dpsw", "vp");
    apply_measurement_sigma(cfg, curves_flags);
    if (!sigma_y_list.empty()) cfg["curves"] = {{"sigma_y_list", sigma_y_list}};
    return run(cfg);
  }
  return 0;
}
